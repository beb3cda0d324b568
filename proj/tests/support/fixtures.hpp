#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "prosabx/features.hpp"
#include "prosabx/manifest.hpp"

namespace fixture {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& child = {}) const;

 private:
  std::filesystem::path path_;
};

struct Shape {
  std::size_t contrasts = 1;
  std::size_t speakers = 2;
  std::size_t takes = 1;
  bool timestamps = false;
};

// Complete dataset: every speaker records every category of every contrast
// `takes` times. Item ids look like "c0_hi_s1_t0"; categories are "hi"/"lo".
prosabx::Dataset complete_dataset(const Shape& shape);

// Items for explicit (contrast, category, speaker, take) cells.
struct Cell {
  std::string contrast;
  std::string category;
  std::string speaker;
  int take = 0;
};
prosabx::Dataset dataset_from_cells(const std::vector<Cell>& cells,
                                    const std::vector<std::string>& contrast_ids);

// 385 pinyin syllables x 6 tone pairs, six speakers covering all four tones.
std::string mandarin_manifest_csv();
std::string mandarin_contrasts_json();

// Random T x D matrix with N(0, 1) entries.
prosabx::FeatureSequence noise_sequence(std::mt19937_64& rng, std::size_t frames,
                                        std::size_t dim, double scale = 1.0);

// Features whose categories differ by a low-frequency contour on top of
// per-item noise and a per-contrast content vector.
std::vector<prosabx::FeatureSequence> prosody_features(const prosabx::Dataset& ds,
                                                       std::uint64_t seed, std::size_t dim = 8);

// i.i.d. noise for every item.
std::vector<prosabx::FeatureSequence> noise_features(const prosabx::Dataset& ds,
                                                     std::uint64_t seed, std::size_t dim = 8);

// Writes <root>/layer<L>/<item_id>.npy for every item.
void write_features(const std::string& root, int layer, const prosabx::Dataset& ds,
                    const std::vector<prosabx::FeatureSequence>& features,
                    bool as_float32 = false);

// Writes manifest.csv and manifest.contrasts.json into dir; returns the CSV path.
std::string write_dataset(const std::string& dir, const prosabx::Dataset& ds);

// Embeds each clipped sequence inside a longer utterance (random prefix and
// suffix frames) at stride 0.02 s / offset 0.01 s. Returns the utterance
// features and a copy of the dataset whose timestamps select exactly the
// embedded frames.
struct InContextCorpus {
  prosabx::Dataset dataset;
  std::vector<prosabx::FeatureSequence> utterances;
};
InContextCorpus embed_in_context(const prosabx::Dataset& ds,
                                 const std::vector<prosabx::FeatureSequence>& clipped,
                                 std::uint64_t seed);

}  // namespace fixture
