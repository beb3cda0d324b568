#include <doctest.h>

#include <cmath>
#include <random>

#include "prosabx/error.hpp"
#include "prosabx/stats.hpp"
#include "support/oracles.hpp"

using namespace prosabx;
using namespace prosabx::stats;
using V = std::vector<double>;

TEST_CASE("pearson examples") {
  const V xs = {1, 2, 3, 4, 5};
  V ys;
  for (double x : xs) ys.push_back(2 * x + 1);
  CHECK(pearson(xs, ys).value == doctest::Approx(1.0));
  CHECK(pearson(xs, V{-1, -2, -3, -4, -5}).value == doctest::Approx(-1.0));
  CHECK(pearson(V{1, 2, 3, 4}, V{2, 1, 4, 3}).value == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(pearson(xs, ys).n == 5);
}

TEST_CASE("pearson errors") {
  CHECK_THROWS_AS(pearson(V{1, 2}, V{1, 2}), Error);
  CHECK_THROWS_AS(pearson(V{1, 2, 3}, V{1, 2}), Error);
  CHECK_THROWS_AS(pearson(V{1, 1, 1}, V{1, 2, 3}), Error);
}

TEST_CASE("pearson matches the textbook formula and is affine invariant") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.1, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 30;
    V x(n), y(n);
    for (auto& v : x) v = g(rng);
    for (std::size_t i = 0; i < n; ++i) y[i] = 0.5 * x[i] + g(rng);
    const double r = pearson(x, y).value;
    CHECK(std::abs(r - oracle::textbook_pearson(x, y)) <= 1e-12);
    const double a = u(rng), b = g(rng) * 10;
    V x2 = x;
    for (auto& v : x2) v = a * v + b;
    CHECK(std::abs(pearson(x2, y).value - r) <= 1e-12);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("spearman examples") {
  CHECK(spearman(V{1, 2, 3}, V{3, 2, 1}).value == doctest::Approx(-1.0));
  CHECK(spearman(V{1, 2, 3, 4, 5}, V{1, 8, 27, 64, 125}).value == doctest::Approx(1.0));
  CHECK(spearman(V{0.1, 0.5, 0.2, 0.9}, V{std::exp(0.1), std::exp(0.5), std::exp(0.2), std::exp(0.9)}).value ==
        doctest::Approx(1.0));
  // Mid-ranks [1, 2.5, 2.5, 4] and [1, 3, 2, 4] give 4.5 / sqrt(4.5 * 5) = 3 / sqrt(10).
  CHECK(spearman(V{1, 2, 2, 4}, V{1, 3, 2, 4}).value == doctest::Approx(3.0 / std::sqrt(10.0)).epsilon(1e-15));
}

TEST_CASE("ranks agree with counting oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    V v(1 + rng() % 20);
    for (auto& x : v) x = static_cast<double>(rng() % 6);
    CHECK(ranks(v) == oracle::count_ranks(v));
  }
  CHECK(ranks(V{1, 2, 2, 4}) == V{1, 2.5, 2.5, 4});
}

TEST_CASE("spearman equals pearson of ranks on tie-free data") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    V x(4 + rng() % 20), y(x.size());
    for (auto& v : x) v = g(rng);
    for (auto& v : y) v = g(rng);
    const V rx = ranks(x), ry = ranks(y);
    CHECK(spearman(x, y).value == pearson(rx, ry).value);
  }
}

TEST_CASE("best layer and regret") {
  const LayerCurve decreasing{"m", {{0, 0.5}, {1, 0.4}, {2, 0.3}}};
  CHECK(best_layer(decreasing) == 2);
  const LayerCurve tie{"m", {{1, 0.5}, {3, 0.2}, {5, 0.4}, {7, 0.2}}};
  CHECK(best_layer(tie) == 3);

  const LayerCurve natural{"m", {{0, 0.10}, {1, 0.20}}};
  const LayerCurve proxy{"m", {{0, 0.9}, {1, 0.1}}};
  CHECK(regret(natural, proxy) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(regret(natural, natural) == 0.0);
  CHECK(regret(proxy, natural) >= 0.0);

  CHECK_THROWS_AS(regret(natural, LayerCurve{"m", {{0, 0.1}, {2, 0.2}}}), Error);
  CHECK_THROWS_AS(LayerCurve({"m", {{1, 0.1}, {1, 0.2}}}).validate(), Error);
  CHECK_THROWS_AS(LayerCurve({"m", {{0, 1.5}}}).validate(), Error);
  CHECK(natural.error_at(1) == 0.20);
  CHECK_FALSE(natural.error_at(4).has_value());
}

TEST_CASE("property: best layer matches a linear scan and regret is non-negative") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    LayerCurve a{"m", {}}, b{"m", {}};
    const int layers = 1 + static_cast<int>(rng() % 12);
    for (int l = 0; l < layers; ++l) {
      a.points.push_back({l * 2, std::round(u(rng) * 10) / 10});
      b.points.push_back({l * 2, std::round(u(rng) * 10) / 10});
    }
    int scan = a.points[0].first;
    double best = a.points[0].second;
    for (const auto& [layer, err] : a.points)
      if (err < best) {
        best = err;
        scan = layer;
      }
    CHECK(best_layer(a) == scan);
    CHECK(regret(a, b) >= 0.0);
    CHECK(regret(a, a) == 0.0);
  }
}

TEST_CASE("wilcoxon examples") {
  const auto all_positive = wilcoxon_signed_rank(V{0.5, 1.1, 0.3, 2.0, 0.8, 1.4});
  CHECK(all_positive.p_value.value() == doctest::Approx(0.03125).epsilon(1e-15));
  CHECK(all_positive.value == 21.0);
  CHECK(wilcoxon_signed_rank(V{1, -1, 2, -2, 3, -3}).p_value.value() == doctest::Approx(1.0));
  const V textbook = {1.1, -0.5, 2.3, 0.9, 1.7, 1.2, -0.4, 1.5};
  CHECK(wilcoxon_signed_rank(textbook).p_value.value() ==
        doctest::Approx(oracle::sign_flip_p(textbook)).epsilon(1e-12));
  CHECK(wilcoxon_signed_rank(textbook).n == 8);
}

TEST_CASE("wilcoxon errors and zero handling") {
  CHECK_THROWS_AS(wilcoxon_signed_rank(V{0, 0, 0, 0, 0, 0}), Error);
  CHECK_THROWS_AS(wilcoxon_signed_rank(V{1, 2, 0, 0, 0, 3}), Error);
  const auto r = wilcoxon_signed_rank(V{0, 1, 2, 3, 4, 5});
  CHECK(r.n == 5);
  CHECK(r.p_value.value() == doctest::Approx(0.0625));
}

TEST_CASE("wilcoxon exact p equals sign-flip enumeration up to n = 12") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.3, 1);
  for (int trial = 0; trial < 200; ++trial) {
    V d(5 + rng() % 8);
    for (auto& v : d) v = trial % 3 == 0 ? std::round(g(rng) * 2) / 2 : g(rng);
    std::size_t nonzero = 0;
    for (double v : d) nonzero += v != 0;
    if (nonzero < 5) continue;
    const double p = wilcoxon_signed_rank(d).p_value.value();
    CHECK(std::abs(p - oracle::sign_flip_p(d)) <= 1e-12);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("wilcoxon normal approximation for large n") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  V d(60);
  for (auto& v : d) v = g(rng);
  const auto r = wilcoxon_signed_rank(d);
  CHECK(r.p_value.value() > 0.0);
  CHECK(r.p_value.value() <= 1.0);
  V shifted = d;
  for (auto& v : shifted) v += 2.0;
  CHECK(wilcoxon_signed_rank(shifted).p_value.value() < 1e-6);
}

TEST_CASE("partial correlation") {
  SUBCASE("constant control reduces to pearson") {
    const V xs = {1, 3, 2, 5, 4, 6}, ys = {2, 1, 4, 3, 6, 5};
    CHECK(partial_correlation(xs, ys, V(6, 7.0)).value ==
          doctest::Approx(pearson(xs, ys).value).epsilon(1e-12));
  }
  SUBCASE("ys equal to the control is degenerate") {
    const V c = {1, 2, 3, 4, 5};
    CHECK_THROWS_AS(partial_correlation(V{2, 1, 4, 3, 5}, c, c), Error);
  }
  SUBCASE("shared dependence on the control is removed") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    V c(40), xs(40), ys(40);
    for (std::size_t i = 0; i < 40; ++i) {
      c[i] = static_cast<double>(i) / 4.0;
      xs[i] = c[i] + g(rng);
      ys[i] = c[i] + g(rng);
    }
    CHECK(pearson(xs, ys).value > 0.8);
    CHECK(std::abs(partial_correlation(xs, ys, c).value) < 0.3);
  }
  SUBCASE("too few points") {
    CHECK_THROWS_AS(partial_correlation(V{1, 2, 3}, V{1, 3, 2}, V{1, 2, 4}), Error);
  }
}

TEST_CASE("bootstrap") {
  SUBCASE("perfect correlation gives [1, 1]") {
    const V x = {1, 2, 3, 4, 5, 6, 7}, y = {3, 5, 7, 9, 11, 13, 15};
    for (Statistic s : {Statistic::pearson, Statistic::spearman}) {
      const auto r = bootstrap_ci(x, y, s, {2000, 1});
      REQUIRE(r.ci.has_value());
      CHECK(r.ci->lo == doctest::Approx(1.0));
      CHECK(r.ci->hi == doctest::Approx(1.0));
    }
  }
  SUBCASE("deterministic under a seed and independent of workers") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    V x(12), y(12);
    for (std::size_t i = 0; i < 12; ++i) {
      x[i] = g(rng);
      y[i] = x[i] + g(rng);
    }
    const auto a = bootstrap_ci(x, y, Statistic::spearman, {3000, 42, 0.95, 1});
    const auto b = bootstrap_ci(x, y, Statistic::spearman, {3000, 42, 0.95, 1});
    const auto c = bootstrap_ci(x, y, Statistic::spearman, {3000, 42, 0.95, 6});
    CHECK(a.ci->lo == b.ci->lo);
    CHECK(a.ci->hi == b.ci->hi);
    CHECK(a.ci->lo == c.ci->lo);
    CHECK(a.ci->hi == c.ci->hi);
    const auto d = bootstrap_ci(x, y, Statistic::spearman, {3000, 43, 0.95, 1});
    CHECK((d.ci->lo != a.ci->lo || d.ci->hi != a.ci->hi));
    CHECK(a.ci->lo <= a.value);
    CHECK(a.value <= a.ci->hi);
  }
  SUBCASE("seventeen pairs at rho near 0.8 give a width comparable to 0.40") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    V x(17), y(17);
    for (std::size_t i = 0; i < 17; ++i) {
      x[i] = g(rng);
      y[i] = 0.8 * x[i] + 0.6 * g(rng);
    }
    const auto r = bootstrap_ci(x, y, Statistic::spearman, {10000, 0});
    CHECK(r.value > 0.65);
    CHECK(r.value < 0.95);
    const double width = r.ci->hi - r.ci->lo;
    CHECK(width >= 0.20);
    CHECK(width <= 0.80);
  }
  SUBCASE("too few pairs") {
    CHECK_THROWS_AS(bootstrap_ci(V{1, 2, 3}, V{1, 2, 3}, Statistic::pearson), Error);
  }
}

TEST_CASE("lower median") {
  CHECK(lower_median({3, 1, 2}) == 2);
  CHECK(lower_median({4, 1, 3, 2}) == 2);
  CHECK(lower_median({5}) == 5);
  CHECK_THROWS_AS(lower_median({}), Error);
}
