#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace oracle {

namespace {

double local(const prosabx::FeatureSequence& a, const prosabx::FeatureSequence& b,
             std::size_t i, std::size_t j, prosabx::Metric metric) {
  return prosabx::frame_distance(a.frame(i), b.frame(j), metric);
}

}  // namespace

double brute_force_dtw(const prosabx::FeatureSequence& a, const prosabx::FeatureSequence& b,
                       prosabx::Metric metric) {
  const std::size_t n = a.frames(), m = b.frames();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j,
                                                                   double acc) {
    acc = (i == 0 && j == 0) ? local(a, b, 0, 0, metric) : acc + local(a, b, i, j, metric);
    if (i == n - 1 && j == m - 1) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
    if (i + 1 < n) walk(i + 1, j, acc);
    if (j + 1 < m) walk(i, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return best;
}

std::size_t count_paths(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> c(n, std::vector<std::size_t>(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (i == 0 && j == 0) {
        c[i][j] = 1;
        continue;
      }
      if (i > 0) c[i][j] += c[i - 1][j];
      if (j > 0) c[i][j] += c[i][j - 1];
      if (i > 0 && j > 0) c[i][j] += c[i - 1][j - 1];
    }
  return c[n - 1][m - 1];
}

std::vector<prosabx::Triplet> brute_force_triplets(const prosabx::Dataset& ds) {
  std::vector<prosabx::Triplet> out;
  const auto& items = ds.items();
  for (std::size_t a = 0; a < items.size(); ++a)
    for (std::size_t b = 0; b < items.size(); ++b)
      for (std::size_t x = 0; x < items.size(); ++x) {
        const auto &ia = items[a], &ib = items[b], &ix = items[x];
        if (ia.contrast_id != ib.contrast_id || ia.contrast_id != ix.contrast_id) continue;
        if (ia.speaker_id != ib.speaker_id) continue;
        if (ia.category == ib.category) continue;
        if (ix.category != ia.category) continue;
        if (ix.speaker_id == ia.speaker_id) continue;
        out.push_back({a, b, x});
      }
  return out;
}

std::vector<double> count_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double smaller = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) ++smaller;
      if (w == v[i]) ++equal;
    }
    r[i] = 1 + smaller + (equal - 1) / 2;
  }
  return r;
}

double sign_flip_p(const std::vector<double>& diffs) {
  std::vector<double> nz;
  for (double d : diffs)
    if (d != 0) nz.push_back(d);
  std::vector<double> mags;
  for (double d : nz) mags.push_back(std::abs(d));
  const auto r = count_ranks(mags);
  double observed = 0;
  for (std::size_t i = 0; i < nz.size(); ++i)
    if (nz[i] > 0) observed += r[i];
  const std::size_t n = nz.size();
  const std::size_t total = std::size_t{1} << n;
  std::size_t le = 0, ge = 0;
  for (std::size_t mask = 0; mask < total; ++mask) {
    double w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) w += r[i];
    if (w <= observed) ++le;
    if (w >= observed) ++ge;
  }
  return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total));
}

double textbook_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double num = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    dx += (x[i] - mx) * (x[i] - mx);
    dy += (y[i] - my) * (y[i] - my);
  }
  return num / std::sqrt(dx * dy);
}

double angle_over_pi(const std::vector<double>& u, const std::vector<double>& v) {
  double dot = 0, uu = 0, vv = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  if (uu == 0 || vv == 0) return 0.5;
  const double cross = std::sqrt(std::max(0.0, uu * vv - dot * dot));
  return std::atan2(cross, dot) / std::numbers::pi;
}

}  // namespace oracle
