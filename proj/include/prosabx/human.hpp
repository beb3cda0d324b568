#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prosabx/abx.hpp"
#include "prosabx/manifest.hpp"
#include "prosabx/stats.hpp"

namespace prosabx {

// One listening-test trial as exported by the web experiment, one JSON
// object per line:
//   {"participant_id":"p01","triplet":{"a":..,"b":..,"x":..},
//    "presented_order":"AB"|"BA","choice":"A"|"B","is_catch":false,
//    "response_ms":1234}
// presented_order gives the playback slots of the triplet's a and b items
// ("AB": a first). choice names the slot the participant picked, so the
// response is correct when the chosen slot holds the item matching X.
struct HumanResponse {
  std::string participant_id;
  std::string a;
  std::string b;
  std::string x;
  bool a_first = true;
  char choice = 'A';
  bool is_catch = false;
  double response_ms = 0;
};

std::vector<HumanResponse> parse_responses(std::string_view jsonl);
std::string write_responses(const std::vector<HumanResponse>& responses);

struct ParticipantSummary {
  std::string participant_id;
  std::size_t trials = 0;
  std::size_t catch_trials = 0;
  std::size_t catch_errors = 0;
  std::optional<double> catch_error_rate;
  bool flagged = false;
};

struct HumanConfig {
  double catch_error_threshold = 0.25;  // flagged when catch error rate exceeds this
  bool exclude_flagged = true;
  AggregationConfig aggregation;
};

struct HumanReport {
  EvaluationReport report;  // non-catch trials of retained participants
  std::vector<ParticipantSummary> participants;  // sorted by participant_id
  std::size_t responses = 0;
  std::size_t catch_responses = 0;
};

// Scores each non-catch response 1 (correct) or 0 and aggregates with the
// same nested averaging as machine ABX. Throws prosabx::Error for responses
// whose items are unknown or whose triplet violates the A/B/X constraints.
HumanReport human_error(const std::vector<HumanResponse>& responses, const Dataset& dataset,
                        const HumanConfig& config = {});

struct WordLevelComparison {
  std::vector<std::string> contrast_ids;
  std::vector<double> human_error;
  std::vector<double> model_error;
  std::optional<stats::StatResult> pearson;
  std::string skipped;  // why pearson is absent
};

// Pearson r between per-contrast error rates over contrasts present in both.
// Left empty, with the reason in `skipped`, when r is undefined.
WordLevelComparison compare_word_level(const EvaluationReport& human,
                                       const EvaluationReport& model);

}  // namespace prosabx
