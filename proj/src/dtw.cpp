#include "prosabx/dtw.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "prosabx/error.hpp"

namespace prosabx {

namespace {

enum Step : std::uint8_t { kStart = 0, kDiagonal = 1, kVertical = 2, kHorizontal = 3 };

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += u[k] * v[k];
    nu += u[k] * u[k];
    nv += v[k] * v[k];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

void check_dims(const FeatureSequence& a, const FeatureSequence& b) {
  if (a.dim() != b.dim())
    throw Error("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                std::to_string(b.dim()));
}

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::angular: return "angular";
    case Metric::cosine_distance: return "cosine";
    case Metric::euclidean: return "euclidean";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "angular") return Metric::angular;
  if (name == "cosine" || name == "cosine_distance") return Metric::cosine_distance;
  if (name == "euclidean") return Metric::euclidean;
  return std::nullopt;
}

double frame_distance(std::span<const double> u, std::span<const double> v, Metric metric) {
  if (u.size() != v.size())
    throw Error("dimension mismatch: " + std::to_string(u.size()) + " vs " +
                std::to_string(v.size()));
  // Identical frames are exactly zero apart under every metric; acos near 1
  // would otherwise leave a residue of order 1e-8.
  if (std::equal(u.begin(), u.end(), v.begin())) return 0.0;
  switch (metric) {
    case Metric::angular:
      return std::acos(cosine_similarity(u, v)) / std::numbers::pi;
    case Metric::cosine_distance:
      return 1.0 - cosine_similarity(u, v);
    case Metric::euclidean: {
      double acc = 0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        const double diff = u[k] - v[k];
        acc += diff * diff;
      }
      return std::sqrt(acc);
    }
  }
  return 0;
}

Alignment dtw_align(const FeatureSequence& first, const FeatureSequence& second, Metric metric) {
  check_dims(first, second);
  const std::size_t n = first.frames(), m = second.frames();

  std::vector<std::uint8_t> back(n * m, kStart);
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double local = frame_distance(first.frame(i), second.frame(j), metric);
      if (i == 0 && j == 0) {
        cur[j] = local;
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      std::uint8_t step = kStart;
      if (i > 0 && j > 0 && prev[j - 1] < best) {
        best = prev[j - 1];
        step = kDiagonal;
      }
      if (i > 0 && prev[j] < best) {
        best = prev[j];
        step = kVertical;
      }
      if (j > 0 && cur[j - 1] < best) {
        best = cur[j - 1];
        step = kHorizontal;
      }
      cur[j] = best + local;
      back[i * m + j] = step;
    }
    std::swap(prev, cur);
  }

  Alignment out;
  out.first_frames = n;
  out.second_frames = m;
  std::size_t i = n - 1, j = m - 1;
  while (true) {
    out.path.emplace_back(i, j);
    const std::uint8_t step = back[i * m + j];
    if (step == kStart) break;
    if (step == kDiagonal) {
      --i;
      --j;
    } else if (step == kVertical) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(out.path.begin(), out.path.end());
  out.local_costs.reserve(out.path.size());
  for (auto [pi, pj] : out.path)
    out.local_costs.push_back(frame_distance(first.frame(pi), second.frame(pj), metric));
  out.d_raw = prev[m - 1];
  out.d = out.d_raw / static_cast<double>(out.path.size());
  return out;
}

double dtw_cost(const FeatureSequence& first, const FeatureSequence& second, Metric metric) {
  check_dims(first, second);
  const std::size_t n = first.frames(), m = second.frames();
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double local = frame_distance(first.frame(i), second.frame(j), metric);
      if (i == 0 && j == 0) {
        cur[j] = local;
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      if (i > 0) best = std::min(best, prev[j]);
      if (j > 0) best = std::min(best, cur[j - 1]);
      cur[j] = best + local;
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

std::vector<TraceRow> local_trace(const Alignment& ax, const Alignment& bx) {
  if (ax.second_frames != bx.second_frames)
    throw Error("trace alignments target X sequences of different lengths (" +
                std::to_string(ax.second_frames) + " vs " + std::to_string(bx.second_frames) +
                ")");
  const std::size_t tx = ax.second_frames;
  std::vector<TraceRow> rows(tx);
  std::vector<double> a_sum(tx, 0.0), b_sum(tx, 0.0);
  for (std::size_t k = 0; k < ax.path.size(); ++k) {
    a_sum[ax.path[k].second] += ax.local_costs[k];
    ++rows[ax.path[k].second].a_steps;
  }
  for (std::size_t k = 0; k < bx.path.size(); ++k) {
    b_sum[bx.path[k].second] += bx.local_costs[k];
    ++rows[bx.path[k].second].b_steps;
  }
  for (std::size_t j = 0; j < tx; ++j) {
    rows[j].x_frame = j;
    // Every X frame is touched at least once by a contiguous path.
    rows[j].a_local = a_sum[j] / static_cast<double>(rows[j].a_steps);
    rows[j].b_local = b_sum[j] / static_cast<double>(rows[j].b_steps);
  }
  return rows;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = "x_frame,a_local,b_local\n";
  for (const auto& r : rows)
    out += std::to_string(r.x_frame) + "," + fmt(r.a_local) + "," + fmt(r.b_local) + "\n";
  return out;
}

}  // namespace prosabx
