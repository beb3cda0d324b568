#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prosabx/dtw.hpp"
#include "prosabx/features.hpp"
#include "prosabx/manifest.hpp"

namespace prosabx {

enum class ContextMode { out_of_context, in_context };

std::string_view to_string(ContextMode m);
std::optional<ContextMode> parse_context(std::string_view name);

struct TripletScore {
  Triplet triplet;
  double d_ax = 0;
  double d_bx = 0;
  double score = 0;  // 1, 0.5 or 0
};

// 1 if d_ax < d_bx, 0.5 on exact equality, 0 otherwise.
double abx_score(double d_ax, double d_bx);

TripletScore score_triplet(const FeatureSequence& ra, const FeatureSequence& rb,
                           const FeatureSequence& rx, Metric metric, Triplet triplet = {});

// How level-1 cells are keyed. The defaults keep speaker pairs ordered
// (speaker of A/B, speaker of X) and give each direction its own cell.
struct AggregationConfig {
  bool ordered_speaker_pairs = true;
  bool directions_in_cell = false;
};

// Level 1: mean over take combinations.
struct CellScore {
  std::string contrast_id;
  std::string speaker_ab;
  std::string speaker_x;
  std::string category_a;  // direction; empty when directions share a cell
  double score = 0;
  std::size_t count = 0;
};

// Mean of the level-1 cells of one speaker pair; reporting only.
struct PairScore {
  std::string contrast_id;
  std::string speaker_ab;
  std::string speaker_x;
  double score = 0;
  std::size_t cells = 0;
  std::size_t count = 0;
};

// Level 2: unweighted mean over the contrast's cells.
struct ContrastScore {
  std::string contrast_id;
  double score = 0;
  std::size_t cells = 0;
  std::size_t count = 0;
};

struct ReportSettings {
  Metric metric = Metric::angular;
  ContextMode context = ContextMode::out_of_context;
  std::optional<int> layer;
  AggregationConfig aggregation;
};

struct EvaluationReport {
  std::vector<CellScore> cells;
  std::vector<PairScore> pairs;
  std::vector<ContrastScore> contrasts;
  double score = 0;       // level 3: unweighted mean over contrasts
  double error_rate = 0;  // 1 - score
  std::size_t triplets = 0;
  ReportSettings settings;

  const ContrastScore* find_contrast(std::string_view contrast_id) const;
  friend bool operator==(const EvaluationReport&, const EvaluationReport&);
};

// Nested averaging. Scores are reduced in the order given (enumeration
// order). Throws prosabx::Error if a score references an item outside the
// dataset or a triplet that violates the A/B/X constraints.
EvaluationReport aggregate(const std::vector<TripletScore>& scores, const Dataset& dataset,
                           const AggregationConfig& config = {});

struct EvalConfig {
  Metric metric = Metric::angular;
  ContextMode context = ContextMode::out_of_context;
  unsigned workers = 1;
  AggregationConfig aggregation;
};

// Loads features for every item, slices them to the word span in in-context
// mode, scores every enumerated triplet and aggregates. Distances for a
// given (A or B, X) pair are computed once and shared across triplets.
EvaluationReport evaluate(const Dataset& dataset, const FeatureSource& source,
                          const EvalConfig& config);

// Same pipeline over features already in memory (indexed like dataset.items()).
EvaluationReport evaluate_loaded(const Dataset& dataset,
                                 const std::vector<FeatureSequence>& features,
                                 const EvalConfig& config);

}  // namespace prosabx
