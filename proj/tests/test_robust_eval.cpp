#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rifa/errors.hpp"
#include "rifa/robust_eval.hpp"

using namespace rifa;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ParamBox kReferenceBox{{50, 340}, {0.02, 0.03}, {0.01, 0.05}, {1e4, 1e5}};
const CopulaSpec kIndependence{CopulaFamily::Independence, 0.0};

Theta random_theta(std::mt19937_64& gen, const ParamBox& box) {
  auto draw = [&](const Interval& iv) {
    return std::uniform_real_distribution<double>(iv.lo, iv.hi)(gen);
  };
  return {draw(box.a), draw(box.b), draw(box.c), draw(box.d)};
}

BenefitSpec survival_only() {
  BenefitSpec b;
  b.surrender_enabled = false;
  return b;
}

}  // namespace

TEST_CASE("conditional value matches the explicit double-exponential form") {
  MarketParams m;
  const oracle::Market om;
  std::mt19937_64 gen(5);
  for (bool surrender : {true, false}) {
    BenefitSpec benefit;
    benefit.surrender_enabled = surrender;
    const PricingModel model(m, benefit, kIndependence);
    for (int k = 0; k < 300; ++k) {
      const std::size_t i = gen() % 256;
      const auto theta = random_theta(gen, kReferenceBox);
      const auto s = oracle::prices(om, i);
      const double expect = oracle::conditional_value(
          om, s, theta.a, theta.b, theta.c, theta.d, 100.0, 0.01, 0.1, surrender);
      CHECK_THAT(model.conditional_value(i, theta), WithinRel(expect, 1e-12));
      CHECK_THAT(conditional_value(model.paths()[i], theta, kIndependence, benefit, m),
                 WithinRel(expect, 1e-12));
    }
  }
}

TEST_CASE("survival-only conditional value") {
  MarketParams m;
  const auto path = make_path(m, 0b10110100);
  const Theta theta{123.0, 0.027, 0.033, 4e4};
  const auto b = survival_only();
  const double vt = std::max(path.prices[8], 100.0 * std::pow(1.01, 8));
  const double expect = std::exp(-oracle::mortality_exponent(0.027, 0.033, 8)) *
                        vt / std::pow(1.05, 8);
  CHECK_THAT(conditional_value(path, theta, kIndependence, b, m),
             WithinRel(expect, 1e-13));
  CHECK(conditional_value(path, {123.0, 1e3, 0.033, 4e4}, kIndependence, b, m) <
        1e-300);
}

TEST_CASE("frozen single-path value") {
  // All-up path, theta = (50, 0.02, 0.01, 1e5), from the explicit formula.
  const oracle::Market om;
  const auto s = oracle::prices(om, 255);
  const double expect =
      oracle::conditional_value(om, s, 50, 0.02, 0.01, 1e5, 100, 0.01, 0.1, true);
  MarketParams m;
  const PricingModel model(m, BenefitSpec{}, kIndependence);
  CHECK_THAT(model.conditional_value(255, {50, 0.02, 0.01, 1e5}),
             WithinRel(expect, 1e-13));
}

TEST_CASE("singleton box collapses every price") {
  MarketParams m;
  const PricingModel model(m, BenefitSpec{}, kIndependence);
  const Theta theta{200.0, 0.02, 0.01, 1e5};
  const auto box = ParamBox::point(theta);
  const auto report = evaluate(model, box, OptimizerConfig{});
  const double classical = model.classical_price(theta);
  CHECK_THAT(report.robust_price, WithinRel(classical, 1e-14));
  CHECK_THAT(report.sup_classical, WithinRel(classical, 1e-14));
  for (const auto& p : report.per_path) CHECK(p.argmax == theta);
}

TEST_CASE("survival-only benefit is directed upwards") {
  MarketParams m;
  const PricingModel model(m, survival_only(), kIndependence);
  const auto report = evaluate(model, kReferenceBox, OptimizerConfig{});
  CHECK(std::abs(report.delta) <= 1e-6);
  for (const auto& p : report.per_path) {
    CHECK(p.argmax.b == 0.02);
    CHECK(p.argmax.c == 0.01);
  }
  CHECK(common_maximizer(model, report.per_path, 1e-12).has_value());
}

TEST_CASE("domination chain on the reference box") {
  MarketParams m;
  const PricingModel model(m, BenefitSpec{}, kIndependence);
  const auto report = evaluate(model, kReferenceBox, OptimizerConfig{});
  CHECK(report.delta >= -1e-9);
  CHECK(report.robust_price >= report.sup_classical - 1e-9);
  std::mt19937_64 gen(11);
  for (int k = 0; k < 200; ++k) {
    CHECK(model.classical_price(random_theta(gen, kReferenceBox)) <=
          report.sup_classical + 1e-9);
  }
  CHECK(model.classical_price({50, 0.02, 0.01, 1e5}) <= report.robust_price);
}

TEST_CASE("per-path maxima dominate random priors") {
  MarketParams m;
  const PricingModel model(m, BenefitSpec{}, kIndependence);
  const auto robust = robust_price(model, kReferenceBox, OptimizerConfig{});
  std::mt19937_64 gen(12);
  std::vector<Theta> thetas;
  for (int k = 0; k < 1000; ++k) thetas.push_back(random_theta(gen, kReferenceBox));
  std::size_t violations = 0;
  for (const auto& p : robust.per_path) {
    for (const auto& theta : thetas) {
      violations += model.conditional_value(p.index, theta) > p.value + 1e-9;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("conditional value decreases in the mortality parameters") {
  MarketParams m;
  const PricingModel model(m, BenefitSpec{}, kIndependence);
  std::mt19937_64 gen(13);
  for (int k = 0; k < 100; ++k) {
    const std::size_t i = gen() % 256;
    const auto theta = random_theta(gen, kReferenceBox);
    const double hb = 1e-6, hc = 1e-6;
    auto at = [&](double db, double dc) {
      Theta t = theta;
      t.b += db;
      t.c += dc;
      return model.conditional_value(i, t);
    };
    CHECK((at(hb, 0) - at(-hb, 0)) / (2 * hb) < 0.0);
    CHECK((at(0, hc) - at(0, -hc)) / (2 * hc) < 0.0);
  }
}

TEST_CASE("optimizer methods agree on the reference box") {
  MarketParams m;
  const PricingModel model(m, BenefitSpec{}, kIndependence);
  OptimizerConfig nm;
  nm.method = OptimizerMethod::NelderMead;
  OptimizerConfig grid;
  grid.method = OptimizerMethod::Grid;
  const OptimizerConfig hybrid;
  for (std::size_t i : {0u, 37u, 128u, 200u, 255u}) {
    const double h = pathwise_esssup(model, i, kReferenceBox, hybrid).value;
    CHECK(h >= pathwise_esssup(model, i, kReferenceBox, nm).value - 1e-9);
    CHECK(h >= pathwise_esssup(model, i, kReferenceBox, grid).value - 1e-9);
    CHECK_THAT(pathwise_esssup(model, i, kReferenceBox, nm).value, WithinRel(h, 1e-3));
  }
}

TEST_CASE("monotone reduction off searches all four coordinates") {
  MarketParams m;
  const PricingModel model(m, BenefitSpec{}, kIndependence);
  OptimizerConfig full;
  full.monotone_reduction = false;
  const OptimizerConfig pinned;
  for (std::size_t i : {3u, 99u, 254u}) {
    const auto a = pathwise_esssup(model, i, kReferenceBox, pinned);
    const auto b = pathwise_esssup(model, i, kReferenceBox, full);
    CHECK(a.value >= b.value - 1e-7);
    CHECK_THAT(b.value, WithinRel(a.value, 1e-4));
  }
}

TEST_CASE("infimum of the classical price") {
  MarketParams m;
  const PricingModel model(m, BenefitSpec{}, kIndependence);
  const auto inf = inf_classical(model, kReferenceBox, OptimizerConfig{});
  CHECK(inf.argmax.b == 0.03);
  CHECK(inf.argmax.c == 0.05);
  std::mt19937_64 gen(14);
  for (int k = 0; k < 200; ++k) {
    CHECK(model.classical_price(random_theta(gen, kReferenceBox)) >= inf.value - 1e-9);
  }
}

TEST_CASE("non-convergence surfaces as a numerical failure") {
  MarketParams m;
  const PricingModel model(m, BenefitSpec{}, kIndependence);
  OptimizerConfig cfg;
  cfg.method = OptimizerMethod::NelderMead;
  cfg.max_iters = 2;
  try {
    pathwise_esssup(model, 17, kReferenceBox, cfg);
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure& e) {
    CHECK(e.best_value() > 0.0);
  }
}

TEST_CASE("results do not depend on the worker count") {
  MarketParams m;
  const PricingModel model(m, BenefitSpec{}, kIndependence);
  setenv("RIFA_THREADS", "1", 1);
  const auto one = robust_price(model, kReferenceBox, OptimizerConfig{});
  setenv("RIFA_THREADS", "4", 1);
  const auto four = robust_price(model, kReferenceBox, OptimizerConfig{});
  unsetenv("RIFA_THREADS");
  CHECK(one.price == four.price);
  for (std::size_t i = 0; i < one.per_path.size(); ++i) {
    CHECK(one.per_path[i].value == four.per_path[i].value);
  }
}

TEST_CASE("optimizer configuration validation") {
  OptimizerConfig cfg;
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.grid_points_per_dim = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(parse_optimizer_method("grid") == OptimizerMethod::Grid);
  CHECK_THROWS_AS(parse_optimizer_method("bfgs"), ConfigError);
}

TEST_CASE("reference box prices, frozen from an independent recomputation") {
  // Per-path grid plus polish and outer search, computed outside the library.
  MarketParams m;
  const PricingModel model(m, BenefitSpec{}, kIndependence);
  const auto report = evaluate(model, kReferenceBox, OptimizerConfig{});
  CHECK_THAT(report.robust_price, WithinRel(95.61384353740175, 1e-9));
  CHECK_THAT(report.sup_classical, WithinRel(90.5215182440802, 1e-9));
  CHECK(report.argmax_outer.a == 340.0);
  CHECK(report.argmax_outer.d == 1e4);
}
