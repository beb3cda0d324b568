#include "prosabx/abx.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <tuple>

#include "prosabx/error.hpp"
#include "prosabx/parallel.hpp"

namespace prosabx {

namespace {

using CellKey = std::tuple<std::string, std::string, std::string, std::string>;

struct Accumulator {
  double sum = 0;
  std::size_t count = 0;
};

void check_triplet(const Dataset& dataset, const Triplet& t) {
  const std::size_t n = dataset.items().size();
  if (t.a >= n || t.b >= n || t.x >= n)
    throw Error("score references an item outside the dataset");
  const Item& a = dataset.item(t.a);
  const Item& b = dataset.item(t.b);
  const Item& x = dataset.item(t.x);
  const bool valid = a.contrast_id == b.contrast_id && a.contrast_id == x.contrast_id &&
                     a.speaker_id == b.speaker_id && a.category != b.category &&
                     x.category == a.category && x.speaker_id != a.speaker_id;
  if (!valid)
    throw Error("score references an invalid triplet (" + a.item_id + ", " + b.item_id + ", " +
                x.item_id + ")");
}

}  // namespace

std::string_view to_string(ContextMode m) {
  return m == ContextMode::in_context ? "in_context" : "out_of_context";
}

std::optional<ContextMode> parse_context(std::string_view name) {
  if (name == "out_of_context" || name == "out") return ContextMode::out_of_context;
  if (name == "in_context" || name == "in") return ContextMode::in_context;
  return std::nullopt;
}

double abx_score(double d_ax, double d_bx) {
  if (d_ax < d_bx) return 1.0;
  if (d_ax == d_bx) return 0.5;
  return 0.0;
}

TripletScore score_triplet(const FeatureSequence& ra, const FeatureSequence& rb,
                           const FeatureSequence& rx, Metric metric, Triplet triplet) {
  TripletScore s;
  s.triplet = triplet;
  s.d_ax = dtw_align(ra, rx, metric).d;
  s.d_bx = dtw_align(rb, rx, metric).d;
  s.score = abx_score(s.d_ax, s.d_bx);
  return s;
}

const ContrastScore* EvaluationReport::find_contrast(std::string_view contrast_id) const {
  for (const auto& c : contrasts)
    if (c.contrast_id == contrast_id) return &c;
  return nullptr;
}

bool operator==(const EvaluationReport& l, const EvaluationReport& r) {
  auto cell_tie = [](const CellScore& c) {
    return std::tie(c.contrast_id, c.speaker_ab, c.speaker_x, c.category_a, c.score, c.count);
  };
  auto pair_tie = [](const PairScore& p) {
    return std::tie(p.contrast_id, p.speaker_ab, p.speaker_x, p.score, p.cells, p.count);
  };
  auto contrast_tie = [](const ContrastScore& c) {
    return std::tie(c.contrast_id, c.score, c.cells, c.count);
  };
  return std::equal(l.cells.begin(), l.cells.end(), r.cells.begin(), r.cells.end(),
                    [&](auto& a, auto& b) { return cell_tie(a) == cell_tie(b); }) &&
         std::equal(l.pairs.begin(), l.pairs.end(), r.pairs.begin(), r.pairs.end(),
                    [&](auto& a, auto& b) { return pair_tie(a) == pair_tie(b); }) &&
         std::equal(l.contrasts.begin(), l.contrasts.end(), r.contrasts.begin(),
                    r.contrasts.end(),
                    [&](auto& a, auto& b) { return contrast_tie(a) == contrast_tie(b); }) &&
         l.score == r.score && l.error_rate == r.error_rate && l.triplets == r.triplets;
}

EvaluationReport aggregate(const std::vector<TripletScore>& scores, const Dataset& dataset,
                           const AggregationConfig& config) {
  if (scores.empty()) throw Error("no triplet scores to aggregate");
  std::map<CellKey, Accumulator> cells;
  for (const TripletScore& s : scores) {
    check_triplet(dataset, s.triplet);
    const Item& a = dataset.item(s.triplet.a);
    const Item& x = dataset.item(s.triplet.x);
    std::string s_ab = a.speaker_id, s_x = x.speaker_id;
    if (!config.ordered_speaker_pairs && s_x < s_ab) std::swap(s_ab, s_x);
    CellKey key{a.contrast_id, s_ab, s_x, config.directions_in_cell ? std::string{} : a.category};
    Accumulator& acc = cells[key];
    acc.sum += s.score;
    ++acc.count;
  }

  EvaluationReport report;
  report.settings.aggregation = config;
  report.triplets = scores.size();

  std::map<std::tuple<std::string, std::string, std::string>, Accumulator> pair_acc;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> pair_counts;
  std::map<std::string, Accumulator> contrast_acc;
  std::map<std::string, std::size_t> contrast_counts;
  for (const auto& [key, acc] : cells) {
    const auto& [cid, s_ab, s_x, cat] = key;
    CellScore c{cid, s_ab, s_x, cat, acc.sum / static_cast<double>(acc.count), acc.count};
    auto& p = pair_acc[{cid, s_ab, s_x}];
    p.sum += c.score;
    ++p.count;
    pair_counts[{cid, s_ab, s_x}] += acc.count;
    auto& k = contrast_acc[cid];
    k.sum += c.score;
    ++k.count;
    contrast_counts[cid] += acc.count;
    report.cells.push_back(std::move(c));
  }
  for (const auto& [key, acc] : pair_acc) {
    const auto& [cid, s_ab, s_x] = key;
    report.pairs.push_back({cid, s_ab, s_x, acc.sum / static_cast<double>(acc.count), acc.count,
                            pair_counts[key]});
  }
  double total = 0;
  for (const auto& [cid, acc] : contrast_acc) {
    const double mean = acc.sum / static_cast<double>(acc.count);
    report.contrasts.push_back({cid, mean, acc.count, contrast_counts[cid]});
    total += mean;
  }
  report.score = total / static_cast<double>(report.contrasts.size());
  report.error_rate = 1.0 - report.score;
  return report;
}

EvaluationReport evaluate_loaded(const Dataset& dataset,
                                 const std::vector<FeatureSequence>& features,
                                 const EvalConfig& config) {
  if (features.size() != dataset.items().size())
    throw Error("feature count does not match dataset item count");
  const auto triplets = enumerate_triplets(dataset);

  // Unique (first, x) distance pairs shared across triplets.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(triplets.size() * 2);
  for (const auto& t : triplets) {
    pairs.emplace_back(t.a, t.x);
    pairs.emplace_back(t.b, t.x);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  std::vector<double> distances(pairs.size());
  parallel_for(pairs.size(), config.workers, [&](std::size_t k) {
    const auto [first, x] = pairs[k];
    distances[k] = dtw_align(features[first], features[x], config.metric).d;
  });
  auto lookup = [&](std::size_t first, std::size_t x) {
    auto it = std::lower_bound(pairs.begin(), pairs.end(), std::make_pair(first, x));
    return distances[static_cast<std::size_t>(it - pairs.begin())];
  };

  std::vector<TripletScore> scores;
  scores.reserve(triplets.size());
  for (const auto& t : triplets) {
    TripletScore s;
    s.triplet = t;
    s.d_ax = lookup(t.a, t.x);
    s.d_bx = lookup(t.b, t.x);
    s.score = abx_score(s.d_ax, s.d_bx);
    scores.push_back(s);
  }
  EvaluationReport report = aggregate(scores, dataset, config.aggregation);
  report.settings.metric = config.metric;
  report.settings.context = config.context;
  return report;
}

EvaluationReport evaluate(const Dataset& dataset, const FeatureSource& source,
                          const EvalConfig& config) {
  const auto& items = dataset.items();
  for (const Item& it : items) {
    const std::string path = source.path_for(it.item_id);
    if (!std::filesystem::is_regular_file(path)) throw MissingFeatureError(it.item_id, path);
    if (config.context == ContextMode::in_context && !it.has_timestamps())
      throw Error("item '" + it.item_id + "' has no start_s/end_s; required in in_context mode");
  }

  std::vector<std::optional<FeatureSequence>> loaded(items.size());
  parallel_for(items.size(), config.workers, [&](std::size_t i) {
    const Item& it = items[i];
    FeatureSequence seq = load_feature_sequence(source.path_for(it.item_id), source.frame_spec);
    if (config.context == ContextMode::in_context)
      seq = slice_frames(seq, *it.start_s, *it.end_s);
    loaded[i].emplace(std::move(seq));
  });
  std::vector<FeatureSequence> features;
  features.reserve(items.size());
  for (auto& f : loaded) features.push_back(std::move(*f));

  EvaluationReport report = evaluate_loaded(dataset, features, config);
  report.settings.layer = source.layer;
  return report;
}

}  // namespace prosabx
