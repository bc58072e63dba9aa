// rifa: batch front end for robust pricing, verdicts, sweeps, Monte Carlo
// diagnostics and risk-measure demos.
//
// Exit codes: 0 ok, 1 internal error, 2 invalid configuration or usage,
// 3 numerical failure, 10 arbitrage exists (check only).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rifa/arbitrage_lab.hpp"
#include "rifa/config.hpp"
#include "rifa/errors.hpp"
#include "rifa/risk_measures.hpp"

namespace {

using nlohmann::ordered_json;
using namespace rifa;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitArbitrage = 10;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

ordered_json theta_json(const Theta& t) {
  return {{"a", t.a}, {"b", t.b}, {"c", t.c}, {"d", t.d}};
}

PricingModel model_of(const RunConfig& cfg) {
  return PricingModel(cfg.market, cfg.benefit, cfg.copula);
}

double require_premium(const RunConfig& cfg) {
  if (!cfg.premium) throw ConfigError("config: premium is required");
  return *cfg.premium;
}

int cmd_price(const RunConfig& cfg, bool echo, std::ostream& out) {
  if (echo) {
    out << dump_config(cfg);
    return kExitOk;
  }
  const auto model = model_of(cfg);
  const auto report = evaluate(model, cfg.theta_box, cfg.optimizer);

  double lo = report.per_path.front().value;
  double hi = lo;
  std::size_t a_at_lower = 0, a_at_upper = 0, d_at_upper = 0;
  for (const auto& p : report.per_path) {
    lo = std::min(lo, p.value);
    hi = std::max(hi, p.value);
    a_at_lower += p.argmax.a == cfg.theta_box.a.lo;
    a_at_upper += p.argmax.a == cfg.theta_box.a.hi;
    d_at_upper += p.argmax.d == cfg.theta_box.d.hi;
  }
  const auto collapse = common_maximizer(model, report.per_path, 1e-9);
  ordered_json doc;
  doc["robust_price"] = report.robust_price;
  doc["sup_classical"] = report.sup_classical;
  doc["delta"] = report.delta;
  doc["argmax_outer"] = theta_json(report.argmax_outer);
  doc["per_path"] = {{"count", report.per_path.size()},
                     {"min_value", lo},
                     {"max_value", hi},
                     {"a_at_lower_bound", a_at_lower},
                     {"a_at_upper_bound", a_at_upper},
                     {"d_at_upper_bound", d_at_upper},
                     {"common_maximizer", collapse.has_value()}};
  out << doc.dump(2) << "\n";
  return kExitOk;
}

int cmd_sweep(RunConfig cfg, const std::string& axis, double lo, double hi,
              int steps, std::ostream& out) {
  if (steps < 1) throw ConfigError("sweep: steps must be at least 1");
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("sweep: lo and hi must be finite");
  }
  static const std::vector<std::string> axes = {"a", "b", "c", "d",
                                                "l", "K", "r_G"};
  if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
    throw ConfigError("sweep: unknown axis '" + axis + "'");
  }
  const auto& box = cfg.theta_box;
  // Reference prior: middle of the a-range, lowest mortality, largest d.
  const Theta reference{0.5 * (box.a.lo + box.a.hi), box.b.lo, box.c.lo,
                        box.d.hi};
  out << "axis_value,price\n";
  for (int k = 0; k < steps; ++k) {
    const double x =
        steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (steps - 1);
    Theta theta = reference;
    BenefitSpec benefit = cfg.benefit;
    if (axis == "a") theta.a = x;
    if (axis == "b") theta.b = x;
    if (axis == "c") theta.c = x;
    if (axis == "d") theta.d = x;
    if (axis == "l") benefit.l = x;
    if (axis == "K") benefit.K = x;
    if (axis == "r_G") benefit.r_G = x;
    theta.validate();
    benefit.validate();
    out << fmt(x) << ',' << fmt(classical_price(theta, cfg.copula, benefit,
                                                cfg.market))
        << '\n';
  }
  return kExitOk;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const double premium = require_premium(cfg);
  const auto model = model_of(cfg);
  const auto report = evaluate(model, cfg.theta_box, cfg.optimizer);
  const auto v =
      nrifa_check(premium, report, model, cfg.theta_box, cfg.optimizer);
  ordered_json doc;
  doc["status"] = std::string(to_string(v.status));
  doc["premium"] = v.premium;
  doc["robust_price"] = v.robust_price;
  doc["inf_classical"] = v.inf_classical;
  doc["inf_argmax"] = theta_json(v.inf_argmax);
  doc["margin_i"] = v.margin_i;
  doc["margin_ii"] = v.margin_ii;
  doc["condition_i"] = v.margin_i >= -kVerdictBand;
  doc["condition_ii"] = v.margin_ii > kVerdictBand;
  doc["boundary"] = v.boundary;
  out << doc.dump(2) << "\n";
  return v.status == VerdictStatus::RifaExists ? kExitArbitrage : kExitOk;
}

std::vector<std::size_t> decade_schedule(std::size_t n_max) {
  std::vector<std::size_t> schedule;
  for (std::size_t n = 100; n < n_max; n *= 10) schedule.push_back(n);
  schedule.push_back(n_max);
  return schedule;
}

int cmd_simulate(const RunConfig& cfg, std::size_t n_max, std::size_t trials,
                 std::ostream& out) {
  const double premium = require_premium(cfg);
  if (!cfg.seed) throw ConfigError("config: seed is required for simulate");
  if (n_max < 1 || trials < 1) {
    throw ConfigError("simulate: n-max and trials must be positive");
  }
  const auto model = model_of(cfg);
  const auto worst = sup_classical(model, cfg.theta_box, cfg.optimizer);

  SimulationOptions opts;
  opts.premium = premium;
  opts.n_schedule = decade_schedule(n_max);
  opts.trials = trials;
  opts.seed = *cfg.seed;
  const auto samples = simulate_portfolio(worst.argmax, model, opts);

  out << "n,rms_error,mean_V\n";
  for (std::size_t k = 0; k < opts.n_schedule.size(); ++k) {
    double sq = 0.0;
    double v = 0.0;
    for (const auto& s : samples) {
      const double err = s.v_terminal[k] - (premium - s.conditional_value);
      sq += err * err;
      v += s.v_terminal[k];
    }
    const double n = static_cast<double>(samples.size());
    out << opts.n_schedule[k] << ',' << fmt(std::sqrt(sq / n)) << ','
        << fmt(v / n) << '\n';
  }
  return kExitOk;
}

// Two-step prices on the lattice itself: atoms are the paths under Q, the
// conditioning blocks are the nodes one step before maturity, and the
// position is the discounted survival payoff.
int cmd_risk(const RunConfig& cfg, std::ostream& out) {
  const auto model = model_of(cfg);
  const auto& paths = model.paths();
  const std::size_t half = paths.size() / 2;
  FiniteCondSpace space;
  std::vector<double> payoff;
  for (const auto& p : paths) {
    space.atoms.push_back({std::to_string(p.index), p.q_weight});
    payoff.push_back(model.payoffs(p.index).survival_pay);
  }
  // Paths sharing the first T-1 moves differ only in the top bit.
  for (std::size_t prefix = 0; prefix < half; ++prefix) {
    space.blocks.push_back({prefix, prefix + half});
  }
  std::vector<double> weights;
  for (std::size_t k = 0; k < space.blocks.size(); ++k) {
    weights.push_back(space.block_mass(k));
  }
  std::vector<double> negated(payoff.size());
  std::transform(payoff.begin(), payoff.end(), negated.begin(),
                 [](double x) { return -x; });

  out << "measure,level,price\n";
  out << "expectation,," << fmt(two_step(space, weights,
                                         cond_expectation(space, payoff)))
      << '\n';
  for (double lambda : {1.0, 0.9, 0.8, 0.5}) {
    out << "avar," << fmt(lambda) << ','
        << fmt(two_step(space, weights, cond_avar(space, negated, lambda)))
        << '\n';
  }
  for (double c : {0.0, 0.01, 0.1, 1.0}) {
    out << "entropic," << fmt(c) << ','
        << fmt(two_step(space, weights, entropic_sup(space, negated, c))) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust insurance-finance pricing and arbitrage checks"};
  app.require_subcommand(1);

  std::string config_path;
  bool echo = false;
  std::string axis;
  double lo = 0.0, hi = 0.0;
  int steps = 0;
  std::size_t n_max = 100000;
  std::size_t trials = 200;

  auto* price = app.add_subcommand("price", "robust and worst-case prices");
  price->add_option("--config", config_path, "config file")->required();
  price->add_flag("--echo-config", echo, "print the parsed config and exit");

  auto* sweep = app.add_subcommand("sweep", "classical price along one axis");
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--axis", axis, "a, b, c, d, l, K or r_G")->required();
  sweep->add_option("--lo", lo, "first axis value")->required();
  sweep->add_option("--hi", hi, "last axis value")->required();
  sweep->add_option("--steps", steps, "number of points")->required();

  auto* check = app.add_subcommand("check", "no-arbitrage verdict");
  check->add_option("--config", config_path, "config file")->required();

  auto* simulate =
      app.add_subcommand("simulate", "law of large numbers diagnostics");
  simulate->add_option("--config", config_path, "config file")->required();
  simulate->add_option("--n-max", n_max, "largest portfolio size");
  simulate->add_option("--trials", trials, "independent portfolios");

  auto* risk = app.add_subcommand("risk", "two-step risk-measure prices");
  risk->add_option("--config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  std::ostringstream out;
  int code = kExitOk;
  try {
    const RunConfig cfg = load_config(config_path);
    if (price->parsed()) code = cmd_price(cfg, echo, out);
    if (sweep->parsed()) code = cmd_sweep(cfg, axis, lo, hi, steps, out);
    if (check->parsed()) code = cmd_check(cfg, out);
    if (simulate->parsed()) code = cmd_simulate(cfg, n_max, trials, out);
    if (risk->parsed()) code = cmd_risk(cfg, out);
  } catch (const ConfigError& e) {
    std::cerr << "rifa: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ResourceError& e) {
    std::cerr << "rifa: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "rifa: " << e.what() << " (best value " << e.best_value()
              << ")\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "rifa: " << e.what() << '\n';
    return kExitInternal;
  }
  std::cout << out.str();
  std::cout.flush();
  return code;
}
