#include "prosabx/curves.hpp"

#include <algorithm>
#include <charconv>

#include "prosabx/error.hpp"
#include "prosabx/report_io.hpp"

namespace prosabx {

namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto comma = line.find(',', pos);
    out.emplace_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

// Layers present in both curves, with their errors.
struct Paired {
  std::vector<double> layers, first, second;
};

Paired pair_layers(const stats::LayerCurve& a, const stats::LayerCurve& b) {
  Paired p;
  for (const auto& [layer, err] : a.points)
    if (auto other = b.error_at(layer)) {
      p.layers.push_back(layer);
      p.first.push_back(err);
      p.second.push_back(*other);
    }
  return p;
}

stats::LayerCurve restrict(const stats::LayerCurve& c, const std::vector<double>& layers) {
  stats::LayerCurve out{c.model_id, {}};
  for (const auto& pt : c.points)
    if (std::find(layers.begin(), layers.end(), pt.first) != layers.end()) out.points.push_back(pt);
  return out;
}

std::optional<double> median_of(const std::vector<PerModel>& v) {
  if (v.empty()) return std::nullopt;
  std::vector<double> vals;
  for (const auto& m : v) vals.push_back(m.value);
  return stats::lower_median(vals);
}

}  // namespace

std::map<std::string, stats::LayerCurve> parse_curves_csv(std::string_view text) {
  std::map<std::string, stats::LayerCurve> curves;
  std::size_t pos = 0, line_no = 0;
  bool header = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto f = split(line);
    if (!header) {
      if (f != std::vector<std::string>{"model_id", "layer", "error_rate"})
        throw ParseError(line_no, "curve header must be 'model_id,layer,error_rate'");
      header = true;
      continue;
    }
    if (f.size() != 3) throw ParseError(line_no, "expected 3 fields");
    int layer = 0;
    double err = 0;
    auto r1 = std::from_chars(f[1].data(), f[1].data() + f[1].size(), layer);
    auto r2 = std::from_chars(f[2].data(), f[2].data() + f[2].size(), err);
    if (r1.ec != std::errc() || r1.ptr != f[1].data() + f[1].size() || r2.ec != std::errc() ||
        r2.ptr != f[2].data() + f[2].size())
      throw ParseError(line_no, "invalid layer or error_rate");
    auto& c = curves[f[0]];
    c.model_id = f[0];
    c.points.emplace_back(layer, err);
  }
  if (!header) throw ParseError(1, "curve file is empty");
  for (auto& [id, c] : curves) {
    std::sort(c.points.begin(), c.points.end());
    c.validate();
  }
  return curves;
}

std::string write_curves_csv(const std::vector<stats::LayerCurve>& curves) {
  std::string out = "model_id,layer,error_rate\n";
  for (const auto& c : curves)
    for (const auto& [layer, err] : c.points)
      out += c.model_id + "," + std::to_string(layer) + "," + format_number(err) + "\n";
  return out;
}

std::optional<Analysis> parse_analysis(std::string_view name) {
  if (name == "pearson") return Analysis::layer_pearson;
  if (name == "regret") return Analysis::regret;
  if (name == "spearman") return Analysis::model_spearman;
  if (name == "partial") return Analysis::partial;
  if (name == "wilcoxon") return Analysis::depth_wilcoxon;
  if (name == "cross") return Analysis::pooled;
  return std::nullopt;
}

std::string_view to_string(Analysis a) {
  switch (a) {
    case Analysis::layer_pearson: return "pearson";
    case Analysis::regret: return "regret";
    case Analysis::model_spearman: return "spearman";
    case Analysis::partial: return "partial";
    case Analysis::depth_wilcoxon: return "wilcoxon";
    case Analysis::pooled: return "cross";
  }
  return "?";
}

CurveComparison compare_curves(const std::map<std::string, stats::LayerCurve>& first,
                               const std::map<std::string, stats::LayerCurve>& second,
                               const std::vector<Analysis>& analyses,
                               const stats::BootstrapOptions& bootstrap) {
  CurveComparison out;
  for (const auto& [id, c] : first)
    if (second.count(id)) out.models.push_back(id);
  auto wants = [&](Analysis a) {
    return std::find(analyses.begin(), analyses.end(), a) != analyses.end();
  };
  auto skip = [&](Analysis a, const std::string& why) { out.skipped[std::string(to_string(a))] = why; };

  if (wants(Analysis::layer_pearson)) {
    for (const auto& id : out.models) {
      auto p = pair_layers(first.at(id), second.at(id));
      try {
        out.layer_r.push_back({id, stats::pearson(p.first, p.second).value});
      } catch (const Error& e) {
        skip(Analysis::layer_pearson, id + ": " + e.what());
      }
    }
    out.layer_r_median = median_of(out.layer_r);
  }

  if (wants(Analysis::regret)) {
    for (const auto& id : out.models) {
      auto p = pair_layers(first.at(id), second.at(id));
      if (p.layers.empty()) {
        skip(Analysis::regret, id + ": no shared layers");
        continue;
      }
      out.regret.push_back({id, stats::regret(restrict(first.at(id), p.layers),
                                              restrict(second.at(id), p.layers))});
    }
    out.regret_median = median_of(out.regret);
  }

  if (wants(Analysis::model_spearman)) {
    std::vector<double> a, b;
    for (const auto& id : out.models) {
      const auto& c1 = first.at(id);
      const auto& c2 = second.at(id);
      a.push_back(*c1.error_at(stats::best_layer(c1)));
      b.push_back(*c2.error_at(stats::best_layer(c2)));
    }
    try {
      if (a.size() >= 4)
        out.model_rho = stats::bootstrap_ci(a, b, stats::Statistic::spearman, bootstrap);
      else
        out.model_rho = stats::spearman(a, b);
    } catch (const Error& e) {
      skip(Analysis::model_spearman, e.what());
    }
  }

  if (wants(Analysis::partial)) {
    for (const auto& id : out.models) {
      auto p = pair_layers(first.at(id), second.at(id));
      try {
        out.partial_r.push_back({id, stats::partial_correlation(p.first, p.second, p.layers).value});
      } catch (const Error& e) {
        skip(Analysis::partial, id + ": " + e.what());
      }
    }
    out.partial_r_median = median_of(out.partial_r);
  }

  if (wants(Analysis::depth_wilcoxon)) {
    std::vector<double> rhos;
    for (const auto& id : out.models) {
      const auto& c1 = first.at(id);
      const auto& c2 = second.at(id);
      out.best_delta.push_back(
          {id, *c1.error_at(stats::best_layer(c1)) - *c2.error_at(stats::best_layer(c2))});
      auto p = pair_layers(c1, c2);
      std::vector<double> delta(p.layers.size());
      for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = p.first[i] - p.second[i];
      try {
        const double rho = stats::spearman(p.layers, delta).value;
        out.depth_rho.push_back({id, rho});
        rhos.push_back(rho);
      } catch (const Error& e) {
        skip(Analysis::depth_wilcoxon, id + ": " + e.what());
      }
    }
    out.best_delta_median = median_of(out.best_delta);
    out.depth_rho_median = median_of(out.depth_rho);
    try {
      out.depth_wilcoxon = stats::wilcoxon_signed_rank(rhos);
    } catch (const Error& e) {
      skip(Analysis::depth_wilcoxon, e.what());
    }
  }

  if (wants(Analysis::pooled)) {
    std::vector<double> a, b;
    for (const auto& id : out.models) {
      auto p = pair_layers(first.at(id), second.at(id));
      a.insert(a.end(), p.first.begin(), p.first.end());
      b.insert(b.end(), p.second.begin(), p.second.end());
    }
    try {
      out.pooled_r = stats::pearson(a, b);
    } catch (const Error& e) {
      skip(Analysis::pooled, e.what());
    }
  }
  return out;
}

}  // namespace prosabx
