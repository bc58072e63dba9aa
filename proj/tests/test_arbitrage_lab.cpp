#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "rifa/arbitrage_lab.hpp"
#include "rifa/errors.hpp"

using namespace rifa;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ParamBox kReferenceBox{{50, 340}, {0.02, 0.03}, {0.01, 0.05}, {1e4, 1e5}};
const CopulaSpec kIndependence{CopulaFamily::Independence, 0.0};

struct Reference {
  PricingModel model{MarketParams{}, BenefitSpec{}, kIndependence};
  OptimizerConfig cfg;
  EvaluationReport report = evaluate(model, kReferenceBox, cfg);
};

const Reference& reference() {
  static const Reference p;
  return p;
}

// Log-log least-squares slope.
double slope(const std::vector<double>& n, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    mx += std::log(n[i]);
    my += std::log(y[i]);
  }
  mx /= n.size();
  my /= n.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    sxy += (std::log(n[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(n[i]) - mx) * (std::log(n[i]) - mx);
  }
  return sxy / sxx;
}

std::vector<double> rms_errors(const std::vector<PortfolioSample>& samples,
                               double premium, std::size_t points) {
  std::vector<double> out;
  for (std::size_t k = 0; k < points; ++k) {
    double sq = 0;
    for (const auto& s : samples) {
      const double e = s.v_terminal[k] - (premium - s.conditional_value);
      sq += e * e;
    }
    out.push_back(std::sqrt(sq / samples.size()));
  }
  return out;
}

}  // namespace

TEST_CASE("verdicts across premiums") {
  const auto& p = reference();
  const double robust = p.report.robust_price;
  auto check = [&](double premium) {
    return nrifa_check(premium, p.report, p.model, kReferenceBox, p.cfg);
  };
  CHECK(check(0.0).status == VerdictStatus::NrifaByI);
  CHECK(check(robust - 0.5).status == VerdictStatus::NrifaByII);
  CHECK(check(robust + 1.0).status == VerdictStatus::RifaExists);
  CHECK(check(80.0).status != VerdictStatus::RifaExists);

  const auto tie = check(robust);
  CHECK(tie.status == VerdictStatus::RifaExists);
  CHECK(tie.boundary);
  CHECK_FALSE(check(robust + 1.0).boundary);

  const auto v = check(80.0);
  CHECK(v.inf_classical <= p.report.sup_classical);
  CHECK_THAT(v.margin_ii, WithinAbs(robust - 80.0, 1e-12));

  bool seen_rifa = false;
  for (double premium = 0.0; premium <= 120.0; premium += 5.0) {
    const bool rifa = check(premium).status == VerdictStatus::RifaExists;
    CHECK((rifa || !seen_rifa));
    seen_rifa = seen_rifa || rifa;
  }
  CHECK(seen_rifa);
}

TEST_CASE("arbitrage construction") {
  const auto& p = reference();
  const double robust = p.report.robust_price;
  const auto nrifa = nrifa_check(80.0, p.report, p.model, kReferenceBox, p.cfg);
  CHECK_THROWS_AS(construct_arbitrage(nrifa, p.report, p.model), ContractError);

  const auto verdict = nrifa_check(robust + 1.0, p.report, p.model, kReferenceBox, p.cfg);
  const auto pair = construct_arbitrage(verdict, p.report, p.model);
  CHECK_THAT(pair.hedge.cost, WithinRel(robust, 1e-12));
  const auto surplus = hedge_surplus(pair, p.model);
  REQUIRE(surplus.size() == 256);
  for (double s : surplus) {
    CHECK(s >= 0.0);
    CHECK_THAT(s, WithinAbs(1.0, 1e-9));
  }

  const auto tie = nrifa_check(robust, p.report, p.model, kReferenceBox, p.cfg);
  for (double s : hedge_surplus(construct_arbitrage(tie, p.report, p.model), p.model)) {
    CHECK(std::abs(s) <= 1e-9);
  }
}

TEST_CASE("constant claim needs no trading") {
  BenefitSpec benefit;
  benefit.K = 1e6;
  benefit.surrender_enabled = false;
  const PricingModel model(MarketParams{}, benefit, kIndependence);
  const auto box = ParamBox::point({200.0, 1e-300, 0.01, 1e5});
  const OptimizerConfig cfg;
  const auto report = evaluate(model, box, cfg);
  const auto verdict = nrifa_check(report.robust_price + 1.0, report, model, box, cfg);
  REQUIRE(verdict.status == VerdictStatus::RifaExists);
  const auto pair = construct_arbitrage(verdict, report, model);
  for (const auto& step : pair.hedge.strategy.holdings) {
    for (double xi : step) CHECK(std::abs(xi) <= 1e-9);
  }
}

TEST_CASE("first passage of step distribution functions") {
  const std::vector<double> cdf{0.0, 0.1, 0.1, 0.4, 0.9};
  CHECK(first_passage(cdf, 0.05) == 1);
  CHECK(first_passage(cdf, 0.1) == 1);
  CHECK(first_passage(cdf, 0.100001) == 3);
  CHECK(first_passage(cdf, 0.9) == 4);
  CHECK(first_passage(cdf, 0.95) == 5);
  const std::vector<double> broken{0.0, 0.5, 0.2};
  CHECK_THROWS_AS(first_passage(broken, 0.9), NumericalFailure);
}

TEST_CASE("degenerate benefit has no averaging error") {
  BenefitSpec benefit;
  benefit.K = 1e6;
  benefit.surrender_enabled = false;
  const PricingModel model(MarketParams{}, benefit, kIndependence);
  SimulationOptions opts;
  opts.premium = 1e6;
  opts.n_schedule = {1, 10, 100, 1000};
  opts.trials = 20;
  opts.seed = 3;
  const double k = 1e6 * std::pow(1.01, 8) / std::pow(1.05, 8);
  for (const auto& s : simulate_portfolio({200.0, 1e-300, 0.01, 1e5}, model, opts)) {
    for (double v : s.v_terminal) {
      CHECK(v == opts.premium - s.conditional_value);
      CHECK_THAT(v, WithinRel(opts.premium - k, 1e-14));
    }
  }
}

TEST_CASE("empirical joint survival matches the conditional law") {
  const auto& p = reference();
  SimulationOptions opts;
  opts.premium = 90.0;
  opts.n_schedule = {100000};
  opts.trials = 4;
  opts.seed = 17;
  const Theta theta{200.0, 0.02, 0.01, 5e4};
  for (const auto& s : simulate_portfolio(theta, p.model, opts)) {
    const auto m = p.model.marginals(s.path, theta);
    const double target = joint_survival(m, kIndependence, 8, 8);
    const double n = 100000.0;
    const double se = std::sqrt(target * (1 - target) / n);
    CHECK(std::abs(s.survivors / n - target) <= 3 * se);
  }
}

TEST_CASE("client draws follow each copula's dependence") {
  for (const CopulaSpec c : {CopulaSpec{CopulaFamily::Clayton, 2.0},
                             CopulaSpec{CopulaFamily::Gumbel, 2.0},
                             CopulaSpec{CopulaFamily::Frank, 5.0}}) {
    const PricingModel model(MarketParams{}, BenefitSpec{}, c);
    SimulationOptions opts;
    opts.n_schedule = {50000};
    opts.trials = 3;
    opts.seed = 5;
    opts.keep_clients = true;
    const Theta theta{150.0, 0.02, 0.01, 2e4};
    for (const auto& s : simulate_portfolio(theta, model, opts)) {
      REQUIRE(s.clients.size() == 50000);
      const auto m = model.marginals(s.path, theta);
      for (auto [a, b] : {std::pair{2, 2}, std::pair{4, 3}, std::pair{8, 8}}) {
        std::size_t hits = 0;
        for (auto [t1, t2] : s.clients) hits += (t1 > a && t2 > b);
        const double target = joint_survival(m, c, a, b);
        const double se = std::sqrt(target * (1 - target) / 50000.0);
        CHECK(std::abs(hits / 50000.0 - target) <= 4 * se + 1e-12);
      }
    }
  }
}

TEST_CASE("averaging error decays like n^-1/2 for every family") {
  for (const CopulaSpec c : {CopulaSpec{CopulaFamily::Independence, 0.0},
                             CopulaSpec{CopulaFamily::Clayton, 2.0},
                             CopulaSpec{CopulaFamily::Gumbel, 2.0},
                             CopulaSpec{CopulaFamily::Frank, 5.0}}) {
    const PricingModel model(MarketParams{}, BenefitSpec{}, c);
    SimulationOptions opts;
    opts.premium = 90.0;
    opts.n_schedule = {100, 1000, 10000};
    opts.trials = 100;
    opts.seed = 1;
    const auto samples = simulate_portfolio({340.0, 0.02, 0.01, 1e4}, model, opts);
    const double b = slope({100, 1000, 10000}, rms_errors(samples, 90.0, 3));
    CHECK(b >= -0.6);
    CHECK(b <= -0.4);
  }
}

TEST_CASE("simulation is independent of the worker count") {
  const auto& p = reference();
  SimulationOptions opts;
  opts.premium = 90.0;
  opts.n_schedule = {10, 1000};
  opts.trials = 16;
  opts.seed = 8;
  setenv("RIFA_THREADS", "1", 1);
  const auto one = simulate_portfolio({100, 0.02, 0.01, 1e4}, p.model, opts);
  setenv("RIFA_THREADS", "5", 1);
  const auto five = simulate_portfolio({100, 0.02, 0.01, 1e4}, p.model, opts);
  unsetenv("RIFA_THREADS");
  for (std::size_t t = 0; t < one.size(); ++t) {
    CHECK(one[t].path == five[t].path);
    CHECK(one[t].v_terminal == five[t].v_terminal);
  }
}

TEST_CASE("simulation preconditions") {
  const auto& p = reference();
  SimulationOptions opts;
  CHECK_THROWS_AS(simulate_portfolio({100, 0.02, 0.01, 1e4}, p.model, opts),
                  ContractError);
  opts.n_schedule = {10, 10};
  CHECK_THROWS_AS(simulate_portfolio({100, 0.02, 0.01, 1e4}, p.model, opts),
                  ContractError);
}

TEST_CASE("verification of the constructed arbitrage") {
  const auto& p = reference();
  const double robust = p.report.robust_price;
  const auto verdict = nrifa_check(robust + 1.0, p.report, p.model, kReferenceBox, p.cfg);
  const auto pair = construct_arbitrage(verdict, p.report, p.model);
  const std::vector<Theta> thetas{p.report.argmax_outer, kReferenceBox.lower(),
                                  kReferenceBox.upper()};
  const auto report = verify_arbitrage(pair, p.model, thetas, 20000, 40, 2);
  CHECK(report.passed);
  CHECK(report.checks[0].mean_outcome > 0.0);

  auto underpriced = pair;
  underpriced.premium = 80.0;
  CHECK_THROWS_AS(verify_arbitrage(underpriced, p.model, thetas, 20000, 40, 2),
                  VerificationFailure);

  auto unhedged = pair;
  for (auto& step : unhedged.hedge.strategy.holdings) {
    std::fill(step.begin(), step.end(), 0.0);
  }
  // The prior that is worst for the highest-valued path.
  const auto top = std::max_element(
      p.report.per_path.begin(), p.report.per_path.end(),
      [](const auto& x, const auto& y) { return x.value < y.value; });
  const std::vector<Theta> adverse{top->argmax};
  CHECK(verify_arbitrage(pair, p.model, adverse, 20000, 40, 2).passed);
  try {
    verify_arbitrage(unhedged, p.model, adverse, 20000, 40, 2);
    FAIL("expected VerificationFailure");
  } catch (const VerificationFailure& e) {
    CHECK(e.report().checks[0].min_slack < 0.0);
  }
}
