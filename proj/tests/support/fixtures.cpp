#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <map>
#include <set>

#include "prosabx/npy.hpp"

namespace fixture {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("prosabx_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string TempDir::str(const std::string& child) const {
  return child.empty() ? path_.string() : (path_ / child).string();
}

prosabx::Dataset complete_dataset(const Shape& shape) {
  std::vector<prosabx::Contrast> contrasts;
  std::vector<prosabx::Item> items;
  for (std::size_t c = 0; c < shape.contrasts; ++c) {
    const std::string cid = "c" + std::to_string(c);
    const std::string seq = "seq" + std::to_string(c);
    contrasts.push_back({cid, seq, "hi", "lo", "xx"});
    for (std::size_t s = 0; s < shape.speakers; ++s)
      for (const char* cat : {"hi", "lo"})
        for (std::size_t t = 0; t < shape.takes; ++t) {
          prosabx::Item it;
          it.item_id = cid + "_" + cat + "_s" + std::to_string(s) + "_t" + std::to_string(t);
          it.contrast_id = cid;
          it.category = cat;
          it.speaker_id = "s" + std::to_string(s);
          it.phonemic_seq = seq;
          it.audio_path = it.item_id + ".wav";
          it.take = static_cast<int>(t);
          if (shape.timestamps) {
            it.start_s = 0.5;
            it.end_s = 1.0;
          }
          items.push_back(std::move(it));
        }
  }
  return prosabx::Dataset(std::move(items), std::move(contrasts));
}

prosabx::Dataset dataset_from_cells(const std::vector<Cell>& cells,
                                    const std::vector<std::string>& contrast_ids) {
  std::vector<prosabx::Contrast> contrasts;
  for (const auto& id : contrast_ids) contrasts.push_back({id, "seq_" + id, "hi", "lo", "xx"});
  std::vector<prosabx::Item> items;
  for (const auto& c : cells) {
    prosabx::Item it;
    it.item_id = c.contrast + "_" + c.category + "_" + c.speaker + "_t" + std::to_string(c.take);
    it.contrast_id = c.contrast;
    it.category = c.category;
    it.speaker_id = c.speaker;
    it.phonemic_seq = "seq_" + c.contrast;
    it.audio_path = it.item_id + ".wav";
    it.take = c.take;
    items.push_back(std::move(it));
  }
  return prosabx::Dataset(std::move(items), std::move(contrasts));
}

namespace {

std::vector<std::string> pinyin_keys() {
  std::vector<std::string> keys;
  const char* initials[] = {"b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h",
                            "j", "q", "x", "zh", "ch", "sh", "r", "z", "c", "s", "y", "w"};
  const char* finals[] = {"a", "o", "e", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng",
                          "ong", "i", "u", "in", "un", "ia", "ie", "iu"};
  for (const char* i : initials)
    for (const char* f : finals) {
      if (keys.size() == 385) return keys;
      keys.push_back(std::string(i) + f);
    }
  return keys;
}

}  // namespace

std::string mandarin_manifest_csv() {
  std::string csv = "item_id,contrast_id,category,speaker_id,phonemic_seq,audio_path,start_s,end_s,take\n";
  const auto keys = pinyin_keys();
  for (const auto& key : keys)
    for (int t1 = 1; t1 <= 4; ++t1)
      for (int t2 = t1 + 1; t2 <= 4; ++t2) {
        const std::string cid = key + "_" + std::to_string(t1) + std::to_string(t2);
        for (int s = 1; s <= 6; ++s)
          for (int tone : {t1, t2}) {
            const std::string spk = "spk" + std::to_string(s);
            const std::string cat = "tone" + std::to_string(tone);
            csv += cid + "_" + cat + "_" + spk + "," + cid + "," + cat + "," + spk + "," + key +
                   "," + spk + "/" + key + std::to_string(tone) + ".wav,,,0\n";
          }
      }
  return csv;
}

std::string mandarin_contrasts_json() {
  std::string json = "[";
  bool first = true;
  for (const auto& key : pinyin_keys())
    for (int t1 = 1; t1 <= 4; ++t1)
      for (int t2 = t1 + 1; t2 <= 4; ++t2) {
        if (!first) json += ",";
        first = false;
        json += "{\"contrast_id\":\"" + key + "_" + std::to_string(t1) + std::to_string(t2) +
                "\",\"phonemic_seq\":\"" + key + "\",\"categories\":[\"tone" +
                std::to_string(t1) + "\",\"tone" + std::to_string(t2) +
                "\"],\"language\":\"zh\"}";
      }
  return json + "]";
}

prosabx::FeatureSequence noise_sequence(std::mt19937_64& rng, std::size_t frames,
                                        std::size_t dim, double scale) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> data(frames * dim);
  for (auto& v : data) v = scale * n01(rng);
  return prosabx::FeatureSequence(frames, dim, std::move(data),
                                  prosabx::FrameSpec::with_default_offset(0.02));
}

std::vector<prosabx::FeatureSequence> prosody_features(const prosabx::Dataset& ds,
                                                       std::uint64_t seed, std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_int_distribution<int> len(18, 30);
  std::map<std::string, std::vector<double>> content;
  for (const auto& c : ds.contrasts()) {
    std::vector<double> v(dim);
    for (auto& x : v) x = n01(rng);
    content[c.contrast_id] = v;
  }
  std::vector<prosabx::FeatureSequence> out;
  for (const auto& it : ds.items()) {
    const auto* c = ds.find_contrast(it.contrast_id);
    const bool rising = it.category == c->category_a;
    const std::size_t frames = static_cast<std::size_t>(len(rng));
    std::vector<double> data(frames * dim);
    for (std::size_t t = 0; t < frames; ++t) {
      const double phase = static_cast<double>(t) / static_cast<double>(frames - 1);
      // Low-frequency pitch-like contour in the first two dimensions.
      const double contour = rising ? std::sin(std::numbers::pi * (phase - 0.5))
                                    : -std::sin(std::numbers::pi * (phase - 0.5));
      for (std::size_t d = 0; d < dim; ++d) {
        double v = content[it.contrast_id][d] + 0.3 * n01(rng);
        if (d == 0) v += 2.0 * contour;
        if (d == 1) v -= 2.0 * contour;
        data[t * dim + d] = v;
      }
    }
    out.emplace_back(frames, dim, std::move(data), prosabx::FrameSpec::with_default_offset(0.02));
  }
  return out;
}

std::vector<prosabx::FeatureSequence> noise_features(const prosabx::Dataset& ds,
                                                     std::uint64_t seed, std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(8, 14);
  std::vector<prosabx::FeatureSequence> out;
  for (std::size_t i = 0; i < ds.items().size(); ++i)
    out.push_back(noise_sequence(rng, static_cast<std::size_t>(len(rng)), dim));
  return out;
}

void write_features(const std::string& root, int layer, const prosabx::Dataset& ds,
                    const std::vector<prosabx::FeatureSequence>& features, bool as_float32) {
  prosabx::FeatureSource src{root, layer, {}};
  fs::create_directories(fs::path(src.path_for("x")).parent_path());
  for (std::size_t i = 0; i < ds.items().size(); ++i)
    prosabx::save_feature_sequence(src.path_for(ds.items()[i].item_id), features[i], as_float32);
}

std::string write_dataset(const std::string& dir, const prosabx::Dataset& ds) {
  fs::create_directories(dir);
  const std::string csv = (fs::path(dir) / "manifest.csv").string();
  std::ofstream(csv) << prosabx::write_manifest_csv(ds);
  std::ofstream((fs::path(dir) / "manifest.contrasts.json").string())
      << prosabx::write_contrasts_json(ds.contrasts());
  return csv;
}

InContextCorpus embed_in_context(const prosabx::Dataset& ds,
                                 const std::vector<prosabx::FeatureSequence>& clipped,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pad(3, 25);
  std::normal_distribution<double> n01(0.0, 1.0);
  const double stride = 0.02;
  InContextCorpus out;
  std::vector<prosabx::Item> items = ds.items();
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& word = clipped[i];
    const std::size_t pre = static_cast<std::size_t>(pad(rng));
    const std::size_t post = static_cast<std::size_t>(pad(rng));
    const std::size_t total = pre + word.frames() + post;
    std::vector<double> data(total * word.dim());
    for (auto& v : data) v = n01(rng);
    std::copy(word.data().begin(), word.data().end(),
              data.begin() + static_cast<std::ptrdiff_t>(pre * word.dim()));
    out.utterances.emplace_back(total, word.dim(), std::move(data),
                                prosabx::FrameSpec{stride, stride / 2});
    items[i].start_s = static_cast<double>(pre) * stride;
    items[i].end_s = static_cast<double>(pre + word.frames()) * stride;
  }
  out.dataset = prosabx::Dataset(std::move(items), ds.contrasts(), ds.meta());
  return out;
}

}  // namespace fixture
