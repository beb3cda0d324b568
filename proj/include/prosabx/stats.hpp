#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace prosabx::stats {

struct ConfidenceInterval {
  double lo = 0;
  double hi = 0;
  double level = 0.95;
};

struct StatResult {
  double value = 0;
  std::optional<ConfidenceInterval> ci;
  std::optional<double> p_value;
  std::size_t n = 0;
};

// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> ranks(std::span<const double> values);

// Sample Pearson r. Requires n >= 3 and nonzero variance in both inputs.
StatResult pearson(std::span<const double> xs, std::span<const double> ys);

// Pearson r of mid-ranks.
StatResult spearman(std::span<const double> xs, std::span<const double> ys);

enum class Statistic { pearson, spearman };

struct BootstrapOptions {
  std::size_t resamples = 10000;
  std::uint64_t seed = 0;
  double level = 0.95;
  unsigned workers = 1;
};

// Percentile bootstrap over (x, y) pairs resampled with replacement.
// Resample k draws from its own generator seeded from (seed, k), so the
// result does not depend on `workers`. Resamples with zero variance in either
// coordinate are redrawn. The interval is widened to contain the point
// estimate if the percentiles exclude it.
StatResult bootstrap_ci(std::span<const double> xs, std::span<const double> ys, Statistic stat,
                        const BootstrapOptions& options = {});

// (layer index, error rate) points, layers strictly increasing.
struct LayerCurve {
  std::string model_id;
  std::vector<std::pair<int, double>> points;

  // Throws prosabx::Error when the invariants do not hold.
  void validate() const;
  std::optional<double> error_at(int layer) const;
};

// Layer with the lowest error; the lowest layer index wins ties.
int best_layer(const LayerCurve& curve);

// natural error at best_layer(proxy) minus natural error at best_layer(natural).
double regret(const LayerCurve& natural, const LayerCurve& proxy);

// Two-sided signed-rank test. Zero differences are dropped and tied
// magnitudes get mid-ranks. `value` is W+ (sum of positive ranks). Exact
// null distribution for n <= 25, tie-corrected normal approximation above.
StatResult wilcoxon_signed_rank(std::span<const double> diffs);

// Pearson r between the residuals of xs and ys after least-squares
// regression (with intercept) on `control`. A constant control reduces to
// plain Pearson.
StatResult partial_correlation(std::span<const double> xs, std::span<const double> ys,
                               std::span<const double> control);

// Lower median for even counts. Throws on empty input.
double lower_median(std::vector<double> values);

}  // namespace prosabx::stats
