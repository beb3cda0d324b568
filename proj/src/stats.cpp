#include "prosabx/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "prosabx/error.hpp"
#include "prosabx/parallel.hpp"

namespace prosabx::stats {

namespace {

void require_pairs(std::span<const double> xs, std::span<const double> ys, std::size_t min_n) {
  if (xs.size() != ys.size())
    throw Error("length mismatch: " + std::to_string(xs.size()) + " vs " +
                std::to_string(ys.size()));
  if (xs.size() < min_n)
    throw Error("need at least " + std::to_string(min_n) + " observations, got " +
                std::to_string(xs.size()));
}

// Returns nullopt when either input has zero variance.
std::optional<double> pearson_r(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> statistic(Statistic stat, std::span<const double> xs,
                                std::span<const double> ys) {
  if (stat == Statistic::pearson) return pearson_r(xs, ys);
  const auto rx = ranks(xs), ry = ranks(ys);
  return pearson_r(rx, ry);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Unbiased draw in [0, n) by rejection; independent of the standard
// library's distribution implementation.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return static_cast<std::size_t>(v % bound);
}

double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace

std::vector<double> ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
  std::vector<double> out(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = mid;
    i = j + 1;
  }
  return out;
}

StatResult pearson(std::span<const double> xs, std::span<const double> ys) {
  require_pairs(xs, ys, 3);
  auto r = pearson_r(xs, ys);
  if (!r) throw Error("pearson: zero variance input");
  return {*r, std::nullopt, std::nullopt, xs.size()};
}

StatResult spearman(std::span<const double> xs, std::span<const double> ys) {
  require_pairs(xs, ys, 3);
  const auto rx = ranks(xs), ry = ranks(ys);
  auto r = pearson_r(rx, ry);
  if (!r) throw Error("spearman: constant ranks");
  return {*r, std::nullopt, std::nullopt, xs.size()};
}

StatResult bootstrap_ci(std::span<const double> xs, std::span<const double> ys, Statistic stat,
                        const BootstrapOptions& options) {
  require_pairs(xs, ys, 4);
  if (options.resamples == 0) throw Error("bootstrap needs at least one resample");
  if (!(options.level > 0 && options.level < 1)) throw Error("CI level must lie in (0, 1)");
  StatResult result = stat == Statistic::pearson ? pearson(xs, ys) : spearman(xs, ys);

  constexpr int kMaxRedraws = 1000;
  const std::size_t n = xs.size();
  std::vector<double> draws(options.resamples, std::numeric_limits<double>::quiet_NaN());
  parallel_for(options.resamples, options.workers, [&](std::size_t k) {
    std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(static_cast<std::uint64_t>(k))));
    std::vector<double> bx(n), by(n);
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t pick = uniform_index(rng, n);
        bx[i] = xs[pick];
        by[i] = ys[pick];
      }
      if (auto r = statistic(stat, bx, by)) {
        draws[k] = *r;
        return;
      }
    }
  });
  std::vector<double> valid;
  valid.reserve(draws.size());
  for (double d : draws)
    if (!std::isnan(d)) valid.push_back(d);
  if (valid.empty()) throw Error("bootstrap: every resample was degenerate");
  std::sort(valid.begin(), valid.end());
  const double alpha = 1.0 - options.level;
  ConfidenceInterval ci{percentile(valid, alpha / 2), percentile(valid, 1 - alpha / 2),
                        options.level};
  ci.lo = std::min(ci.lo, result.value);
  ci.hi = std::max(ci.hi, result.value);
  result.ci = ci;
  return result;
}

void LayerCurve::validate() const {
  if (points.empty()) throw Error("layer curve '" + model_id + "' is empty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && points[i].first <= points[i - 1].first)
      throw Error("layer curve '" + model_id + "': layer indices must be strictly increasing");
    if (!(points[i].second >= 0.0 && points[i].second <= 1.0))
      throw Error("layer curve '" + model_id + "': error rate outside [0, 1]");
  }
}

std::optional<double> LayerCurve::error_at(int layer) const {
  for (const auto& [l, e] : points)
    if (l == layer) return e;
  return std::nullopt;
}

int best_layer(const LayerCurve& curve) {
  curve.validate();
  auto best = curve.points.front();
  for (const auto& p : curve.points)
    if (p.second < best.second) best = p;
  return best.first;
}

double regret(const LayerCurve& natural, const LayerCurve& proxy) {
  natural.validate();
  proxy.validate();
  if (natural.points.size() != proxy.points.size() ||
      !std::equal(natural.points.begin(), natural.points.end(), proxy.points.begin(),
                  [](const auto& l, const auto& r) { return l.first == r.first; }))
    throw Error("regret: natural and proxy curves cover different layers");
  const double chosen = *natural.error_at(best_layer(proxy));
  const double oracle = *natural.error_at(best_layer(natural));
  return chosen - oracle;
}

StatResult wilcoxon_signed_rank(std::span<const double> diffs) {
  std::vector<double> nonzero;
  for (double d : diffs)
    if (d != 0.0) nonzero.push_back(d);
  if (nonzero.empty()) throw Error("wilcoxon: all differences are zero");
  if (nonzero.size() < 5)
    throw Error("wilcoxon: need at least 5 nonzero differences, got " +
                std::to_string(nonzero.size()));
  const std::size_t n = nonzero.size();
  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(nonzero[i]);
  const auto r = ranks(mags);
  double w_plus = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (nonzero[i] > 0) w_plus += r[i];

  StatResult out;
  out.value = w_plus;
  out.n = n;
  if (n <= 25) {
    // Mid-ranks are multiples of 1/2, so doubled ranks are integers.
    std::vector<std::size_t> doubled(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = static_cast<std::size_t>(std::lround(2 * r[i]));
      total += doubled[i];
    }
    std::vector<std::uint64_t> counts(total + 1, 0);
    counts[0] = 1;
    std::size_t reach = 0;
    for (std::size_t v : doubled) {
      for (std::size_t s = reach + 1; s-- > 0;)
        if (counts[s]) counts[s + v] += counts[s];
      reach += v;
    }
    const auto observed = static_cast<std::size_t>(std::lround(2 * w_plus));
    std::uint64_t le = 0, ge = 0;
    for (std::size_t s = 0; s <= total; ++s) {
      if (s <= observed) le += counts[s];
      if (s >= observed) ge += counts[s];
    }
    const double denom = std::ldexp(1.0, static_cast<int>(n));
    out.p_value = std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / denom);
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1) / 4;
    double var = nn * (nn + 1) * (2 * nn + 1) / 24;
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      var -= (t * t * t - t) / 48;
      i = j;
    }
    out.p_value = var > 0 ? std::min(1.0, normal_two_sided_p((w_plus - mean) / std::sqrt(var)))
                          : 1.0;
  }
  return out;
}

StatResult partial_correlation(std::span<const double> xs, std::span<const double> ys,
                               std::span<const double> control) {
  require_pairs(xs, ys, 4);
  if (control.size() != xs.size()) throw Error("partial correlation: control length mismatch");
  const double n = static_cast<double>(xs.size());
  const double mc = std::accumulate(control.begin(), control.end(), 0.0) / n;
  double scc = 0;
  for (double c : control) scc += (c - mc) * (c - mc);

  auto residualize = [&](std::span<const double> v, const char* name) {
    const double mv = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double scv = 0, svv = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      scv += (control[i] - mc) * (v[i] - mv);
      svv += (v[i] - mv) * (v[i] - mv);
    }
    const double beta = scc > 0 ? scv / scc : 0.0;
    std::vector<double> res(v.size());
    double srr = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      res[i] = (v[i] - mv) - beta * (control[i] - mc);
      srr += res[i] * res[i];
    }
    if (!(srr > 1e-24 * svv) || srr == 0.0)
      throw Error(std::string("partial correlation: residuals of ") + name +
                  " are degenerate (explained entirely by the control)");
    return res;
  };
  const auto rx = residualize(xs, "xs");
  const auto ry = residualize(ys, "ys");
  auto r = pearson_r(rx, ry);
  if (!r) throw Error("partial correlation: degenerate residuals");
  return {*r, std::nullopt, std::nullopt, xs.size()};
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw Error("median of an empty list");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

}  // namespace prosabx::stats
