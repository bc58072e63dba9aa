#include "rifa/arbitrage_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rifa/errors.hpp"
#include "rifa/parallel.hpp"
#include "rifa/rng.hpp"

namespace rifa {

namespace {

constexpr double kBudgetSigmas = 5.0;

std::size_t draw_path(std::span<const double> cumulative, double u) {
  const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) return cumulative.size() - 1;
  return static_cast<std::size_t>(it - cumulative.begin());
}

std::vector<double> cdf_from_survival(const std::vector<double>& survival) {
  std::vector<double> cdf(survival.size());
  for (std::size_t t = 0; t < survival.size(); ++t) cdf[t] = 1.0 - survival[t];
  return cdf;
}

// Discounted benefit of one client; death and surrender in the same period
// leave nothing, and a surrender at T pays nothing.
double client_benefit(const DiscountedPayoffs& pay, int T, int tau1, int tau2) {
  if (tau2 <= T - 1 && tau1 > tau2) return pay.surrender_pays[tau2];
  if (tau1 > T && tau2 > T) return pay.survival_pay;
  return 0.0;
}

void check_schedule(const SimulationOptions& opts) {
  if (opts.n_schedule.empty()) {
    throw ContractError("simulate_portfolio: empty client schedule");
  }
  if (opts.n_schedule.front() == 0 ||
      !std::is_sorted(opts.n_schedule.begin(), opts.n_schedule.end(),
                      std::less_equal<>())) {
    throw ContractError(
        "simulate_portfolio: schedule must be positive and strictly increasing");
  }
  if (opts.trials == 0) {
    throw ContractError("simulate_portfolio: trials must be positive");
  }
}

}  // namespace

std::string_view to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::NrifaByI:
      return "NRIFA_by_i";
    case VerdictStatus::NrifaByII:
      return "NRIFA_by_ii";
    case VerdictStatus::RifaExists:
      return "RIFA_exists";
  }
  return "unknown";
}

Verdict nrifa_check(double premium, const EvaluationReport& report,
                    const PricingModel& model, const ParamBox& box,
                    const OptimizerConfig& cfg) {
  if (!std::isfinite(premium)) {
    throw ContractError("nrifa_check: premium must be finite");
  }
  const auto inf = inf_classical(model, box, cfg);
  Verdict v;
  v.premium = premium;
  v.robust_price = report.robust_price;
  v.inf_classical = inf.value;
  v.inf_argmax = inf.argmax;
  v.margin_i = inf.value - premium;
  v.margin_ii = report.robust_price - premium;
  if (v.margin_i >= -kVerdictBand) {
    v.status = VerdictStatus::NrifaByI;
  } else if (v.margin_ii > kVerdictBand) {
    v.status = VerdictStatus::NrifaByII;
  } else {
    v.status = VerdictStatus::RifaExists;
    v.boundary = std::abs(v.margin_ii) <= kVerdictBand;
  }
  return v;
}

ArbitragePair construct_arbitrage(const Verdict& verdict,
                                  const EvaluationReport& report,
                                  const PricingModel& model) {
  if (verdict.status != VerdictStatus::RifaExists) {
    throw ContractError("construct_arbitrage: verdict is " +
                        std::string(to_string(verdict.status)) +
                        ", no arbitrage to construct");
  }
  const auto& paths = model.paths();
  if (report.per_path.size() != paths.size()) {
    throw ContractError("construct_arbitrage: report does not match the model");
  }
  ArbitragePair pair;
  pair.premium = verdict.premium;
  pair.claim.values.resize(paths.size());
  for (const auto& p : report.per_path) pair.claim.values.at(p.index) = p.value;
  pair.hedge = superhedge(model.market(), pair.claim);
  return pair;
}

std::vector<double> hedge_surplus(const ArbitragePair& pair,
                                  const PricingModel& model) {
  std::vector<double> surplus(model.paths().size());
  for (std::size_t i = 0; i < surplus.size(); ++i) {
    surplus[i] = pair.premium +
                 pair.hedge.strategy.gains(model.market(), i) -
                 pair.claim.values[i];
  }
  return surplus;
}

int first_passage(std::span<const double> cdf, double u) {
  const int T = static_cast<int>(cdf.size()) - 1;
  double previous = 0.0;
  for (int t = 1; t <= T; ++t) {
    const double f = cdf[t];
    if (!(f >= previous - 1e-15 && f <= 1.0 + 1e-15)) {
      throw NumericalFailure("first_passage: distribution function is not a CDF");
    }
    if (f >= u) return t;
    previous = f;
  }
  return T + 1;
}

std::vector<PortfolioSample> simulate_portfolio(const Theta& theta,
                                                const PricingModel& model,
                                                const SimulationOptions& opts) {
  theta.validate();
  check_schedule(opts);
  const auto& paths = model.paths();
  std::vector<double> cumulative(paths.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    acc += paths[i].q_weight;
    cumulative[i] = acc;
  }
  const int T = model.market().T;
  const bool surrender = model.benefit().surrender_enabled;
  const std::size_t n_max = opts.n_schedule.back();

  return parallel_map(opts.trials, [&](std::size_t trial) {
    Rng rng = Rng::substream(opts.seed, trial);
    PortfolioSample sample;
    sample.trial = trial;
    sample.path = draw_path(cumulative, rng.uniform());
    sample.conditional_value = model.conditional_value(sample.path, theta);

    const auto m = model.marginals(sample.path, theta);
    const auto death_cdf = cdf_from_survival(m.death);
    const auto surrender_cdf = cdf_from_survival(m.surrender);
    const auto& pay = model.payoffs(sample.path);
    if (opts.keep_clients) sample.clients.reserve(n_max);

    double mean = 0.0;
    double m2 = 0.0;
    std::size_t next = 0;
    for (std::size_t n = 1; n <= n_max; ++n) {
      const auto [u, w] = sample_pair(model.copula(), rng);
      const int tau1 = first_passage(death_cdf, u);
      const int tau2 = surrender ? first_passage(surrender_cdf, w) : T + 1;
      if (tau1 > T && tau2 > T) ++sample.survivors;
      if (opts.keep_clients) sample.clients.emplace_back(tau1, tau2);

      const double x = client_benefit(pay, T, tau1, tau2);
      const double delta = x - mean;
      mean += delta / static_cast<double>(n);
      m2 += delta * (x - mean);
      if (n == opts.n_schedule[next]) {
        sample.v_terminal.push_back(opts.premium - mean);
        sample.benefit_sd.push_back(
            n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0);
        ++next;
      }
    }
    return sample;
  });
}

VerificationReport verify_arbitrage(const ArbitragePair& pair,
                                    const PricingModel& model,
                                    std::span<const Theta> thetas,
                                    std::size_t clients, std::size_t trials,
                                    std::uint64_t seed) {
  if (thetas.empty()) {
    throw ContractError("verify_arbitrage: no thetas to check");
  }
  VerificationReport report;
  report.clients = clients;
  report.trials = trials;
  const double scale = std::sqrt(static_cast<double>(clients));
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    SimulationOptions opts;
    opts.premium = pair.premium;
    opts.n_schedule = {clients};
    opts.trials = trials;
    opts.seed = seed + 0x9E3779B97F4A7C15ull * k;
    const auto samples = simulate_portfolio(thetas[k], model, opts);

    ThetaCheck check;
    check.theta = thetas[k];
    check.min_slack = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (const auto& s : samples) {
      const double outcome =
          pair.hedge.strategy.gains(model.market(), s.path) + s.v_terminal[0];
      const double budget =
          std::max(kBudgetSigmas * s.benefit_sd[0] / scale, kVerdictBand);
      const double slack = outcome + budget;
      check.min_slack = std::min(check.min_slack, slack);
      if (slack < 0.0) ++check.violations;
      total += outcome;
    }
    check.mean_outcome = total / static_cast<double>(samples.size());
    report.checks.push_back(check);
  }

  const bool within_budget =
      std::all_of(report.checks.begin(), report.checks.end(),
                  [](const ThetaCheck& c) { return c.violations == 0; });
  const bool strict = pair.premium - pair.hedge.cost > kVerdictBand;
  const bool profitable =
      std::any_of(report.checks.begin(), report.checks.end(),
                  [](const ThetaCheck& c) { return c.mean_outcome > 0.0; });
  report.passed = within_budget && (profitable || !strict);
  if (!within_budget) {
    throw VerificationFailure(
        "verify_arbitrage: outcome below the Monte Carlo budget", report);
  }
  if (!report.passed) {
    throw VerificationFailure(
        "verify_arbitrage: no theta with a positive mean outcome", report);
  }
  return report;
}

}  // namespace rifa
