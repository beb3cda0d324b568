#include <doctest.h>

#include "prosabx/curves.hpp"
#include "prosabx/error.hpp"

using namespace prosabx;
using stats::LayerCurve;

namespace {

std::map<std::string, LayerCurve> curves(const std::vector<std::pair<std::string, std::vector<double>>>& spec) {
  std::map<std::string, LayerCurve> out;
  for (const auto& [id, errs] : spec) {
    LayerCurve c{id, {}};
    for (std::size_t l = 0; l < errs.size(); ++l) c.points.push_back({static_cast<int>(l), errs[l]});
    out[id] = c;
  }
  return out;
}

}  // namespace

TEST_CASE("curve CSV round trip") {
  const std::string text = "model_id,layer,error_rate\nm2,1,0.3\nm1,2,0.1\nm1,0,0.4\nm2,0,0.2\n";
  const auto parsed = parse_curves_csv(text);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed.at("m1").points == std::vector<std::pair<int, double>>{{0, 0.4}, {2, 0.1}});
  std::vector<LayerCurve> list;
  for (const auto& [id, c] : parsed) list.push_back(c);
  CHECK(parse_curves_csv(write_curves_csv(list)).at("m2").points == parsed.at("m2").points);
  CHECK_THROWS_AS(parse_curves_csv("model,layer\n"), ParseError);
  CHECK_THROWS_AS(parse_curves_csv("model_id,layer,error_rate\nm,x,0.1\n"), ParseError);
  CHECK_THROWS_AS(parse_curves_csv("model_id,layer,error_rate\nm,0,0.1\nm,0,0.2\n"), Error);
}

TEST_CASE("identical conditions") {
  const auto c = curves({{"a", {0.4, 0.2, 0.3, 0.35}}, {"b", {0.3, 0.25, 0.1, 0.2}},
                         {"c", {0.5, 0.45, 0.3, 0.4}}, {"d", {0.2, 0.15, 0.12, 0.3}},
                         {"e", {0.33, 0.22, 0.11, 0.44}}});
  const auto cmp = compare_curves(c, c,
                                  {Analysis::layer_pearson, Analysis::regret, Analysis::model_spearman,
                                   Analysis::pooled},
                                  {500, 3});
  CHECK(cmp.models.size() == 5);
  CHECK(cmp.layer_r_median == doctest::Approx(1.0));
  CHECK(cmp.regret_median == 0.0);
  REQUIRE(cmp.model_rho.has_value());
  CHECK(cmp.model_rho->value == doctest::Approx(1.0));
  REQUIRE(cmp.pooled_r.has_value());
  CHECK(cmp.pooled_r->value == doctest::Approx(1.0));
}

TEST_CASE("regret and best-layer delta per model") {
  const auto nat = curves({{"m", {0.10, 0.20}}});
  const auto syn = curves({{"m", {0.9, 0.1}}});
  const auto cmp = compare_curves(nat, syn, {Analysis::regret, Analysis::depth_wilcoxon}, {200, 0});
  REQUIRE(cmp.regret.size() == 1);
  CHECK(cmp.regret[0].value == doctest::Approx(0.10));
  REQUIRE(cmp.best_delta.size() == 1);
  CHECK(cmp.best_delta[0].value == doctest::Approx(0.0));
  CHECK(cmp.skipped.count("wilcoxon") == 1);
}

TEST_CASE("analyses that cannot run are reported as skipped") {
  const auto a = curves({{"m", {0.1, 0.2}}});
  const auto cmp = compare_curves(a, a, {Analysis::layer_pearson, Analysis::model_spearman}, {100, 0});
  CHECK(cmp.skipped.count("pearson") == 1);
  CHECK(cmp.skipped.count("spearman") == 1);
  CHECK_FALSE(cmp.model_rho.has_value());
}

TEST_CASE("analysis names") {
  for (Analysis a : {Analysis::layer_pearson, Analysis::regret, Analysis::model_spearman,
                     Analysis::partial, Analysis::depth_wilcoxon, Analysis::pooled})
    CHECK(parse_analysis(to_string(a)) == a);
  CHECK_FALSE(parse_analysis("anova").has_value());
}
