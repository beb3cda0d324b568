#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prosabx {

// One recording of one word token.
struct Item {
  std::string item_id;
  std::string contrast_id;
  std::string category;
  std::string speaker_id;
  std::string phonemic_seq;
  std::string audio_path;
  std::optional<double> start_s;
  std::optional<double> end_s;
  int take = 0;

  bool has_timestamps() const { return start_s.has_value(); }
};

// A prosodic minimal pair: two categories realised over one phonemic sequence.
struct Contrast {
  std::string contrast_id;
  std::string phonemic_seq;
  std::string category_a;
  std::string category_b;
  std::string language;
};

struct DatasetMeta {
  std::string name;
  std::string language;
  std::string source;
};

class Dataset {
 public:
  Dataset() = default;
  // Checks every cross-reference invariant; throws ParseError on violation.
  Dataset(std::vector<Item> items, std::vector<Contrast> contrasts, DatasetMeta meta = {});

  const std::vector<Item>& items() const { return items_; }
  const std::vector<Contrast>& contrasts() const { return contrasts_; }
  const DatasetMeta& meta() const { return meta_; }

  const Item& item(std::size_t index) const { return items_.at(index); }
  std::optional<std::size_t> find_item(std::string_view item_id) const;
  const Contrast* find_contrast(std::string_view contrast_id) const;

 private:
  friend Dataset parse_manifest(std::string_view, std::vector<Contrast>, DatasetMeta);
  Dataset(std::vector<Item> items, std::vector<Contrast> contrasts, DatasetMeta meta,
          const std::vector<std::size_t>& source_lines);

  std::vector<Item> items_;
  std::vector<Contrast> contrasts_;
  DatasetMeta meta_;
  std::map<std::string, std::size_t, std::less<>> item_index_;
  std::map<std::string, std::size_t, std::less<>> contrast_index_;
};

// Indices into Dataset::items(). A and B share speaker and contrast but differ
// in category; X shares A's category and comes from another speaker.
struct Triplet {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t x = 0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

// Parses the contrast sidecar:
// [{"contrast_id":..., "phonemic_seq":..., "categories":[c1,c2], "language":...}]
std::vector<Contrast> parse_contrasts(std::string_view json_text);

// Parses the manifest CSV against an already-parsed contrast list. Row order
// becomes item order. Errors carry the 1-based line number of the bad row.
Dataset parse_manifest(std::string_view csv_text, std::vector<Contrast> contrasts,
                       DatasetMeta meta = {});

// Reads both files from disk. When `contrasts_path` is empty the sidecar is
// looked up next to the manifest (see default_contrasts_path).
Dataset load_dataset(const std::string& manifest_path, const std::string& contrasts_path = {});

// "m.csv" -> "m.contrasts.json".
std::string default_contrasts_path(const std::string& manifest_path);

// Renders a dataset back to the manifest CSV and contrast JSON formats.
std::string write_manifest_csv(const Dataset& dataset);
std::string write_contrasts_json(const std::vector<Contrast>& contrasts);

struct CoverageIssue {
  enum class Kind { too_few_speakers, zero_triplets };
  Kind kind;
  std::string contrast_id;
  std::string category;  // empty for zero_triplets
  std::size_t speakers = 0;
};

struct ValidationReport {
  std::size_t min_speakers = 2;
  std::vector<CoverageIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Speaker-coverage check. Issues are ordered by contrast_id, then category.
ValidationReport validate_speaker_coverage(const Dataset& dataset, std::size_t min_speakers = 2);

// Exhaustive, deterministic triplet enumeration. Order: contrast_id, then
// (speaker of A/B, speaker of X), then direction (A in category_a first),
// then (take A, take B, take X).
std::vector<Triplet> enumerate_triplets(const Dataset& dataset);

// Number of triplets enumerate_triplets would produce for one contrast.
std::size_t count_triplets(const Dataset& dataset, std::string_view contrast_id);

}  // namespace prosabx
