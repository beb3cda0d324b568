#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "prosabx/features.hpp"

namespace prosabx::dsp {

struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 16000;
};

struct DspConfig {
  double window_s = 0.025;
  double hop_s = 0.010;
  std::size_t n_fft = 0;  // 0: next power of two >= window length in samples
  std::size_t n_mels = 40;
  std::size_t n_mfcc = 13;
  double fmin_hz = 20.0;
  double fmax_hz = 0.0;  // 0: Nyquist
  double log_floor = 1e-10;
};

// Sample-domain framing derived from a config and a sample rate.
struct Framing {
  std::size_t window = 0;
  std::size_t hop = 0;
  std::size_t n_fft = 0;
  double fmax_hz = 0;
};

// Validates the config against the rate; throws prosabx::Error.
Framing resolve(const DspConfig& cfg, int sample_rate_hz);

// 1 + floor((N - window) / hop); 0 when the signal is shorter than a window.
std::size_t frame_count(std::size_t n_samples, const Framing& framing);

// PCM16 or IEEE float32, any channel count (averaged to mono).
Waveform read_wav(const std::string& path);
Waveform parse_wav(const std::string& bytes, const std::string& label = "<memory>");
// 16-bit PCM mono writer, samples clipped to [-1, 1).
void write_wav(const std::string& path, const Waveform& w);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// n_mels + 2 edge frequencies; filter m spans [edges[m], edges[m+2]] and peaks at edges[m+1].
std::vector<double> mel_edges_hz(std::size_t n_mels, double fmin_hz, double fmax_hz);

// n_mels x (n_fft/2 + 1) triangular weights, each filter integrating to one over Hz.
std::vector<std::vector<double>> mel_filterbank(std::size_t n_mels, std::size_t n_fft,
                                                int sample_rate_hz, double fmin_hz,
                                                double fmax_hz);

// Log power mel spectrogram. FrameSpec{hop_s, window_s / 2}.
FeatureSequence mel_spectrogram(const Waveform& w, const DspConfig& cfg);

// Orthonormal DCT-II of each log-mel frame, first n_mfcc coefficients.
FeatureSequence mfcc(const Waveform& w, const DspConfig& cfg);

std::vector<double> dct_ii(const std::vector<double>& x);
// Inverse of dct_ii (orthonormal DCT-III).
std::vector<double> dct_iii(const std::vector<double>& c);

}  // namespace prosabx::dsp
