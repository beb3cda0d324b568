#include "prosabx/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "prosabx/error.hpp"

namespace prosabx::dsp {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T read_le(const std::string& bytes, std::size_t off) {
  T v;
  std::memcpy(&v, bytes.data() + off, sizeof(T));
  return v;
}

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    if (!in_ || !out_) throw std::bad_alloc();
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }

  // |X_k|^2 for k = 0..n/2
  void power(std::vector<double>& out) {
    fftw_execute(plan_);
    out.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Framing resolve(const DspConfig& cfg, int sample_rate_hz) {
  if (sample_rate_hz <= 0) throw Error("sample rate must be positive");
  if (!(cfg.hop_s > 0) || !(cfg.hop_s <= cfg.window_s))
    throw Error("dsp config requires 0 < hop_s <= window_s");
  if (cfg.n_mels == 0 || cfg.n_mfcc > cfg.n_mels)
    throw Error("dsp config requires 1 <= n_mels and n_mfcc <= n_mels");
  if (!(cfg.log_floor > 0)) throw Error("log_floor must be positive");
  Framing f;
  f.window = static_cast<std::size_t>(std::lround(cfg.window_s * sample_rate_hz));
  f.hop = static_cast<std::size_t>(std::lround(cfg.hop_s * sample_rate_hz));
  if (f.window == 0 || f.hop == 0) throw Error("window and hop must span at least one sample");
  f.n_fft = cfg.n_fft ? cfg.n_fft : next_pow2(f.window);
  if (f.n_fft < f.window) throw Error("n_fft must be >= window length");
  const double nyquist = sample_rate_hz / 2.0;
  f.fmax_hz = cfg.fmax_hz > 0 ? cfg.fmax_hz : nyquist;
  if (!(cfg.fmin_hz >= 0) || !(cfg.fmin_hz < f.fmax_hz) || f.fmax_hz > nyquist)
    throw Error("dsp config requires 0 <= fmin_hz < fmax_hz <= Nyquist");
  return f;
}

std::size_t frame_count(std::size_t n_samples, const Framing& framing) {
  if (n_samples < framing.window) return 0;
  return 1 + (n_samples - framing.window) / framing.hop;
}

Waveform parse_wav(const std::string& bytes, const std::string& label) {
  auto fail = [&](const std::string& what) -> Error {
    return Error("wav '" + label + "': " + what);
  };
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0)
    throw fail("not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const auto size = read_le<std::uint32_t>(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + size > bytes.size()) throw fail("truncated fmt chunk");
      format = read_le<std::uint16_t>(bytes, body);
      channels = read_le<std::uint16_t>(bytes, body + 2);
      rate = read_le<std::uint32_t>(bytes, body + 4);
      bits = read_le<std::uint16_t>(bytes, body + 14);
      if (format == kFormatExtensible) {
        if (size < 26) throw fail("truncated extensible fmt chunk");
        format = read_le<std::uint16_t>(bytes, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw fail("data chunk before fmt chunk");
      if (body + size > bytes.size()) throw fail("truncated data chunk");
      if (channels == 0 || rate == 0) throw fail("invalid channel count or rate");
      const bool pcm16 = format == kFormatPcm && bits == 16;
      const bool f32 = format == kFormatFloat && bits == 32;
      if (!pcm16 && !f32)
        throw fail("unsupported codec (format " + std::to_string(format) + ", " +
                   std::to_string(bits) + " bits)");
      const std::size_t width = bits / 8;
      const std::size_t frames = size / (width * channels);
      Waveform w;
      w.sample_rate_hz = static_cast<int>(rate);
      w.samples.resize(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0;
        for (std::size_t c = 0; c < channels; ++c) {
          const std::size_t off = body + (i * channels + c) * width;
          acc += pcm16 ? read_le<std::int16_t>(bytes, off) / 32768.0
                       : static_cast<double>(read_le<float>(bytes, off));
        }
        w.samples[i] = acc / channels;
      }
      if (w.samples.empty()) throw fail("no samples");
      return w;
    }
    pos = body + size + (size & 1);
  }
  throw fail(have_fmt ? "missing data chunk" : "missing fmt chunk");
}

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_wav(ss.str(), path);
}

void write_wav(const std::string& path, const Waveform& w) {
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  const std::uint32_t data_bytes = n * 2;
  std::string out = "RIFF";
  auto put32 = [&](std::uint32_t v) { out.append(reinterpret_cast<const char*>(&v), 4); };
  auto put16 = [&](std::uint16_t v) { out.append(reinterpret_cast<const char*>(&v), 2); };
  put32(36 + data_bytes);
  out += "WAVEfmt ";
  put32(16);
  put16(kFormatPcm);
  put16(1);
  put32(static_cast<std::uint32_t>(w.sample_rate_hz));
  put32(static_cast<std::uint32_t>(w.sample_rate_hz) * 2);
  put16(2);
  put16(16);
  out += "data";
  put32(data_bytes);
  for (double s : w.samples) {
    const double scaled = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    put16(static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path + "'");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> mel_edges_hz(std::size_t n_mels, double fmin_hz, double fmax_hz) {
  const double lo = hz_to_mel(fmin_hz);
  const double hi = hz_to_mel(fmax_hz);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  return edges;
}

std::vector<std::vector<double>> mel_filterbank(std::size_t n_mels, std::size_t n_fft,
                                                int sample_rate_hz, double fmin_hz,
                                                double fmax_hz) {
  const auto edges = mel_edges_hz(n_mels, fmin_hz, fmax_hz);
  const std::size_t n_bins = n_fft / 2 + 1;
  std::vector<std::vector<double>> bank(n_mels, std::vector<double>(n_bins, 0.0));
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    const double peak = 2.0 / (right - left);
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / static_cast<double>(n_fft);
      double w = 0;
      if (f > left && f <= center) w = (f - left) / (center - left);
      else if (f > center && f < right) w = (right - f) / (right - center);
      bank[m][k] = w * peak;
    }
  }
  return bank;
}

FeatureSequence mel_spectrogram(const Waveform& w, const DspConfig& cfg) {
  const Framing fr = resolve(cfg, w.sample_rate_hz);
  const std::size_t frames = frame_count(w.samples.size(), fr);
  if (frames == 0)
    throw Error("waveform of " + std::to_string(w.samples.size()) +
                " samples is shorter than one window (" + std::to_string(fr.window) + ")");

  const auto bank = mel_filterbank(cfg.n_mels, fr.n_fft, w.sample_rate_hz, cfg.fmin_hz, fr.fmax_hz);
  // Periodic Hann window.
  std::vector<double> window(fr.window);
  for (std::size_t n = 0; n < fr.window; ++n)
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                     static_cast<double>(fr.window));

  RealFft fft(fr.n_fft);
  std::vector<double> power;
  std::vector<double> out(frames * cfg.n_mels);
  const double floor_log = std::log(cfg.log_floor);
  for (std::size_t t = 0; t < frames; ++t) {
    double* in = fft.input();
    const double* src = w.samples.data() + t * fr.hop;
    for (std::size_t n = 0; n < fr.window; ++n) in[n] = src[n] * window[n];
    std::fill(in + fr.window, in + fr.n_fft, 0.0);
    fft.power(power);
    for (std::size_t m = 0; m < cfg.n_mels; ++m) {
      double e = 0;
      for (std::size_t k = 0; k < power.size(); ++k) e += bank[m][k] * power[k];
      out[t * cfg.n_mels + m] = e > cfg.log_floor ? std::log(e) : floor_log;
    }
  }
  return FeatureSequence(frames, cfg.n_mels, std::move(out), {cfg.hop_s, cfg.window_s / 2});
}

std::vector<double> dct_ii(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> c(n, 0.0);
  const double scale0 = std::sqrt(1.0 / static_cast<double>(n));
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i)
      acc += x[i] * std::cos(std::numbers::pi * static_cast<double>(k) *
                             (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n)));
    c[k] = acc * (k == 0 ? scale0 : scale);
  }
  return c;
}

std::vector<double> dct_iii(const std::vector<double>& c) {
  const std::size_t n = c.size();
  std::vector<double> x(n, 0.0);
  const double scale0 = std::sqrt(1.0 / static_cast<double>(n));
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = c[0] * scale0;
    for (std::size_t k = 1; k < n; ++k)
      acc += c[k] * scale *
             std::cos(std::numbers::pi * static_cast<double>(k) *
                      (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n)));
    x[i] = acc;
  }
  return x;
}

FeatureSequence mfcc(const Waveform& w, const DspConfig& cfg) {
  const FeatureSequence mel = mel_spectrogram(w, cfg);
  std::vector<double> out;
  out.reserve(mel.frames() * cfg.n_mfcc);
  for (std::size_t t = 0; t < mel.frames(); ++t) {
    auto f = mel.frame(t);
    const auto c = dct_ii(std::vector<double>(f.begin(), f.end()));
    out.insert(out.end(), c.begin(), c.begin() + static_cast<std::ptrdiff_t>(cfg.n_mfcc));
  }
  return FeatureSequence(mel.frames(), cfg.n_mfcc, std::move(out), mel.frame_spec());
}

}  // namespace prosabx::dsp
