#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prosabx/features.hpp"

namespace prosabx {

enum class Metric { angular, cosine_distance, euclidean };

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

// angular = arccos(cos_sim) / pi in [0, 1]; cosine_distance = 1 - cos_sim;
// euclidean = ||u - v||. cos_sim with a zero vector is taken as 0.
// Throws prosabx::Error on dimension mismatch.
double frame_distance(std::span<const double> u, std::span<const double> v, Metric metric);

struct Alignment {
  double d_raw = 0;
  double d = 0;  // d_raw / path.size()
  std::vector<std::pair<std::size_t, std::size_t>> path;
  std::vector<double> local_costs;
  std::size_t first_frames = 0;
  std::size_t second_frames = 0;
};

// Unconstrained DTW with unit steps (i+1, j+1), (i+1, j), (i, j+1) and no
// step weights. Cost ties in backtracking resolve diagonal, then (i-1, j),
// then (i, j-1). Accumulation is float64 in path order, so d_raw equals the
// left-to-right sum of local_costs exactly.
Alignment dtw_align(const FeatureSequence& first, const FeatureSequence& second, Metric metric);

// Cost only; same recurrence as dtw_align without path recovery.
double dtw_cost(const FeatureSequence& first, const FeatureSequence& second, Metric metric);

struct TraceRow {
  std::size_t x_frame = 0;
  double a_local = 0;
  double b_local = 0;
  std::size_t a_steps = 0;
  std::size_t b_steps = 0;
};

// Per X frame: mean local cost of the path steps that touch it, for the A->X
// and B->X alignments. X must be the second sequence of both alignments.
std::vector<TraceRow> local_trace(const Alignment& ax, const Alignment& bx);

// CSV with header "x_frame,a_local,b_local".
std::string trace_csv(const std::vector<TraceRow>& rows);

}  // namespace prosabx
