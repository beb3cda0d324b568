#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prosabx/stats.hpp"

namespace prosabx {

// CSV with header "model_id,layer,error_rate"; rows may come in any order.
// Curves are returned keyed by model id with layers sorted.
std::map<std::string, stats::LayerCurve> parse_curves_csv(std::string_view text);
std::string write_curves_csv(const std::vector<stats::LayerCurve>& curves);

// Comparisons between two conditions over the same models, e.g. natural vs
// synthesized speech or out- vs in-context features.
struct PerModel {
  std::string model_id;
  double value = 0;
};

struct CurveComparison {
  std::vector<std::string> models;  // present in both inputs

  // Layer-wise Pearson r per model and its lower median.
  std::vector<PerModel> layer_r;
  std::optional<double> layer_r_median;

  // Regret of choosing the layer on the second condition, per model.
  std::vector<PerModel> regret;
  std::optional<double> regret_median;

  // Spearman rank correlation of best-layer errors across models.
  std::optional<stats::StatResult> model_rho;

  // Per-model partial r between conditions controlling for layer index.
  std::vector<PerModel> partial_r;
  std::optional<double> partial_r_median;

  // Best-layer delta (first - second) per model, its median, the per-model
  // Spearman correlation between layer index and layer-wise delta, and a
  // Wilcoxon signed-rank test of those correlations against zero.
  std::vector<PerModel> best_delta;
  std::optional<double> best_delta_median;
  std::vector<PerModel> depth_rho;
  std::optional<double> depth_rho_median;
  std::optional<stats::StatResult> depth_wilcoxon;

  // Pearson r over every shared (model, layer) point.
  std::optional<stats::StatResult> pooled_r;

  // Reasons an analysis could not be computed, keyed by analysis name.
  std::map<std::string, std::string> skipped;
};

enum class Analysis { layer_pearson, regret, model_spearman, partial, depth_wilcoxon, pooled };

std::optional<Analysis> parse_analysis(std::string_view name);
std::string_view to_string(Analysis a);

// Runs the requested analyses. An analysis whose preconditions fail (too few
// layers or models, zero variance) is recorded in `skipped`.
CurveComparison compare_curves(const std::map<std::string, stats::LayerCurve>& first,
                               const std::map<std::string, stats::LayerCurve>& second,
                               const std::vector<Analysis>& analyses,
                               const stats::BootstrapOptions& bootstrap = {});

}  // namespace prosabx
