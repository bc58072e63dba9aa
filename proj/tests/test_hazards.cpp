#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rifa/errors.hpp"
#include "rifa/hazards.hpp"

using namespace rifa;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gompertz cdf") {
  const Theta theta{50.0, 0.02, 0.01, 1e4};
  CHECK(gompertz_cdf(theta, 0) == 0.0);
  CHECK_THAT(gompertz_cdf({50.0, 1e-12, 0.01, 1e4}, 8), WithinAbs(0.0, 1e-10));
  // Direct eight-term summation, frozen.
  CHECK_THAT(gompertz_cdf(theta, 8), WithinRel(0.15273575277302553, 1e-13));

  double previous = 0.0;
  for (int t = 1; t <= 12; ++t) {
    const double f = gompertz_cdf(theta, t);
    CHECK(f > previous);
    CHECK(f <= 1.0);
    CHECK(gompertz_cdf({50.0, 0.021, 0.01, 1e4}, t) > f);
    // c only enters from the second period on.
    if (t >= 2) CHECK(gompertz_cdf({50.0, 0.02, 0.011, 1e4}, t) > f);
    previous = f;
  }
}

TEST_CASE("surrender cdf") {
  const std::vector<double> prices{100.0, 110.0};
  const Theta theta{50.0, 0.02, 0.01, 1e4};
  CHECK(surrender_cdf(prices, theta, 0) == 0.0);
  CHECK_THAT(surrender_cdf(prices, theta, 1),
             WithinRel(1.0 - std::exp(-0.25), 1e-14));

  const std::vector<double> flat(9, 120.0);
  for (int t = 0; t <= 8; ++t) {
    CHECK(surrender_cdf(flat, {120.0, 0.02, 0.01, 1e4}, t) == 0.0);
  }
  CHECK_THROWS_AS(surrender_cdf(prices, theta, 3), ContractError);
}

TEST_CASE("surrender cdf only sees the price prefix") {
  MarketParams m;
  const auto a = make_path(m, 0b00010110);
  const auto b = make_path(m, 0b11100110);  // same first four moves
  const Theta theta{140.0, 0.02, 0.01, 3e4};
  for (int t = 0; t <= 4; ++t) {
    CHECK(surrender_cdf(a, theta, t) == surrender_cdf(b, theta, t));
  }
  CHECK(surrender_cdf(a, theta, 6) != surrender_cdf(b, theta, 6));
}

TEST_CASE("prefix moments match direct summation") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> a_dist(0.0, 400.0);
  MarketParams m;
  const oracle::Market om;
  for (std::size_t index : {0u, 17u, 100u, 255u}) {
    const auto path = make_path(m, index);
    const SurrenderMoments moments(path.prices);
    CHECK(moments.horizon() == 8);
    for (int k = 0; k < 20; ++k) {
      const double a = a_dist(gen);
      for (int t = 0; t <= 8; ++t) {
        const double direct = oracle::surrender_exponent(path.prices, a, 1.0, t);
        CHECK_THAT(moments.squared_deviation(a, t),
                   WithinAbs(direct, 1e-9 * (1.0 + direct)));
      }
    }
  }
}

TEST_CASE("marginal survivals") {
  MarketParams m;
  const auto path = make_path(m, 77);
  const SurrenderMoments moments(path.prices);
  const Theta theta{180.0, 0.025, 0.03, 5e4};
  const auto on = marginal_survivals(moments, theta, true);
  const auto off = marginal_survivals(moments, theta, false);
  REQUIRE(on.death.size() == 9);
  for (int t = 0; t <= 8; ++t) {
    CHECK_THAT(on.death[t], WithinRel(1.0 - gompertz_cdf(theta, t), 1e-14));
    CHECK_THAT(on.surrender[t],
               WithinAbs(1.0 - surrender_cdf(path, theta, t), 1e-14));
    CHECK(off.surrender[t] == 1.0);
  }
}

TEST_CASE("cox cdf") {
  const HazardPath hazard{{0.0, 1.0, 2.0, 3.0}};
  CHECK(cox_cdf(0.5, hazard, 0) == 0.0);
  CHECK_THAT(cox_cdf(0.5, hazard, 2), WithinRel(1.0 - std::exp(-1.0), 1e-15));
  CHECK_THAT(cox_cdf(std::log(2.0), hazard, 1), WithinAbs(0.5, 1e-15));
  CHECK(cox_cdf(0.6, hazard, 2) > cox_cdf(0.5, hazard, 2));
  CHECK(cox_cdf(0.5, hazard, 3) > cox_cdf(0.5, hazard, 2));
  CHECK_THROWS_AS(cox_cdf(0.5, HazardPath{{0.0, 2.0, 1.0}}, 1), ContractError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(Theta({1.0, 0.0, 0.01, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(Theta({1.0, 0.01, 0.01, -1.0}).validate(), ConfigError);
  ParamBox box{{50, 340}, {0.02, 0.03}, {0.01, 0.05}, {1e4, 1e5}};
  CHECK_NOTHROW(box.validate());
  CHECK(box.contains({100.0, 0.025, 0.02, 2e4}));
  CHECK_FALSE(box.contains({10.0, 0.025, 0.02, 2e4}));
  box.b = {0.03, 0.02};
  CHECK_THROWS_AS(box.validate(), ConfigError);
  box.b = {0.0, 0.02};
  CHECK_THROWS_AS(box.validate(), ConfigError);
}
