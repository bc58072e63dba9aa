#include "rifa/robust_eval.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "rifa/errors.hpp"
#include "rifa/optimizer.hpp"
#include "rifa/parallel.hpp"

namespace rifa {

namespace {

// Upper bound on grid evaluations per optimization; the per-dimension
// resolution is lowered for 3- and 4-dimensional searches.
constexpr long kMaxGridPoints = 1L << 16;
constexpr double kSimplexTolerance = 1e-7;

double& component(Theta& theta, int k) {
  switch (k) {
    case 0:
      return theta.a;
    case 1:
      return theta.b;
    case 2:
      return theta.c;
    default:
      return theta.d;
  }
}

const Interval& component(const ParamBox& box, int k) {
  switch (k) {
    case 0:
      return box.a;
    case 1:
      return box.b;
    case 2:
      return box.c;
    default:
      return box.d;
  }
}

enum class Goal { Maximize, Minimize };

// The free coordinates of theta together with the pinned values of the rest.
struct SearchSpace {
  Theta base;
  std::vector<int> free;
  opt::Box box;

  Theta at(std::span<const double> x) const {
    Theta theta = base;
    for (std::size_t i = 0; i < free.size(); ++i) {
      component(theta, free[i]) = x[i];
    }
    return theta;
  }
};

SearchSpace make_space(const ParamBox& box, bool pin_mortality, Goal goal) {
  SearchSpace space;
  space.base = box.lower();
  for (int k = 0; k < 4; ++k) {
    const Interval& iv = component(box, k);
    const bool mortality = (k == 1 || k == 2);
    if (mortality && pin_mortality) {
      // G is nonincreasing in b and c: the maximum sits at the lower corner
      // and the minimum at the upper corner.
      component(space.base, k) = goal == Goal::Maximize ? iv.lo : iv.hi;
      continue;
    }
    if (iv.degenerate()) continue;
    space.free.push_back(k);
    space.box.lo.push_back(iv.lo);
    space.box.hi.push_back(iv.hi);
  }
  return space;
}

int grid_resolution(int requested, std::size_t dims) {
  int points = requested;
  auto total = [&](int p) {
    long n = 1;
    for (std::size_t i = 0; i < dims; ++i) n *= p;
    return n;
  };
  while (points > 2 && total(points) > kMaxGridPoints) --points;
  return points;
}

template <typename F>
Optimum optimize(const F& value_at, const SearchSpace& space,
                 const OptimizerConfig& cfg, Goal goal) {
  const double sign = goal == Goal::Maximize ? 1.0 : -1.0;
  if (space.free.empty()) {
    return {value_at(space.base), space.base};
  }
  const opt::Objective objective = [&](std::span<const double> x) {
    return sign * value_at(space.at(x));
  };

  opt::NelderMeadOptions nm;
  nm.ftol = cfg.tolerance;
  nm.xtol = kSimplexTolerance;
  nm.max_iters = cfg.max_iters;

  opt::Result best;
  best.value = -std::numeric_limits<double>::infinity();
  bool any_converged = false;
  auto consider = [&](const opt::Result& r) {
    if (r.value > best.value) best = r;
  };
  auto run_nm = [&](std::span<const double> start) {
    const auto r = opt::nelder_mead_max(objective, start, space.box, nm);
    any_converged = any_converged || r.converged;
    consider(r);
  };

  if (cfg.method != OptimizerMethod::Grid) {
    for (const auto& unit : opt::latin_starts(cfg.multistarts,
                                              space.free.size())) {
      run_nm(space.box.from_unit(unit));
    }
    // Per-path maximizers often sit on a face of the box.
    const std::size_t dims = space.free.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << dims); ++mask) {
      std::vector<double> vertex(dims);
      for (std::size_t j = 0; j < dims; ++j) vertex[j] = (mask >> j) & 1u;
      run_nm(space.box.from_unit(vertex));
    }
  }
  if (cfg.method != OptimizerMethod::NelderMead) {
    const auto grid = opt::grid_max(
        objective, space.box,
        grid_resolution(cfg.grid_points_per_dim, space.free.size()));
    consider(grid);
    if (cfg.method == OptimizerMethod::Hybrid) {
      run_nm(grid.x);
    }
  }
  if (cfg.method != OptimizerMethod::Grid && !any_converged) {
    throw NumericalFailure("optimizer: Nelder-Mead did not converge within " +
                               std::to_string(cfg.max_iters) + " iterations",
                           sign * best.value);
  }
  return {sign * best.value, space.at(best.x)};
}

}  // namespace

std::string_view to_string(OptimizerMethod method) {
  switch (method) {
    case OptimizerMethod::NelderMead:
      return "nelder_mead";
    case OptimizerMethod::Grid:
      return "grid";
    case OptimizerMethod::Hybrid:
      return "hybrid";
  }
  return "unknown";
}

OptimizerMethod parse_optimizer_method(std::string_view name) {
  for (auto m : {OptimizerMethod::NelderMead, OptimizerMethod::Grid,
                 OptimizerMethod::Hybrid}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("optimizer: unknown method '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
  if (!(tolerance > 0.0)) {
    throw ConfigError("optimizer: tolerance must be positive");
  }
  if (grid_points_per_dim < 2) {
    throw ConfigError("optimizer: grid_points must be at least 2");
  }
  if (multistarts < 1) {
    throw ConfigError("optimizer: multistarts must be at least 1");
  }
  if (max_iters < 1) {
    throw ConfigError("optimizer: max_iters must be at least 1");
  }
}

PricingModel::PricingModel(const MarketParams& market,
                           const BenefitSpec& benefit, const CopulaSpec& copula)
    : market_(market), benefit_(benefit), copula_(copula) {
  market_.validate();
  benefit_.validate();
  copula_.validate();
  paths_ = enumerate_paths(market_);
  moments_.reserve(paths_.size());
  payoffs_.reserve(paths_.size());
  for (const auto& path : paths_) {
    moments_.emplace_back(path.prices);
    payoffs_.push_back(discounted_payoffs(benefit_, market_, path));
  }
}

MarginalSurvivals PricingModel::marginals(std::size_t path,
                                          const Theta& theta) const {
  return marginal_survivals(moments_.at(path), theta,
                            benefit_.surrender_enabled);
}

double PricingModel::conditional_value(std::size_t path,
                                       const Theta& theta) const {
  const auto m = marginals(path, theta);
  const auto& pay = payoffs_[path];
  const int T = market_.T;
  double value = pay.survival_pay * joint_survival(m, copula_, T, T);
  if (benefit_.surrender_enabled) {
    for (int t = 1; t < T; ++t) {
      value += pay.surrender_pays[t] * surrender_slice_prob(m, copula_, t);
    }
  }
  return value;
}

double PricingModel::classical_price(const Theta& theta) const {
  double total = 0.0;
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    total += paths_[i].q_weight * conditional_value(i, theta);
  }
  return total;
}

bool PricingModel::mortality_monotone() const {
  // Payoffs are max(S_t, K(t)) scaled by (1-l) >= 0 and positive discount
  // factors, hence nonnegative for every validated BenefitSpec; the copula
  // parameter is fixed across the box.
  return benefit_.K >= 0.0 && benefit_.l <= 1.0;
}

double conditional_value(const Path& path, const Theta& theta,
                         const CopulaSpec& spec, const BenefitSpec& benefit,
                         const MarketParams& market) {
  const SurrenderMoments moments(path.prices);
  const auto m = marginal_survivals(moments, theta, benefit.surrender_enabled);
  const auto pay = discounted_payoffs(benefit, market, path);
  const int T = path.horizon();
  double value = pay.survival_pay * joint_survival(m, spec, T, T);
  if (benefit.surrender_enabled) {
    for (int t = 1; t < T; ++t) {
      value += pay.surrender_pays[t] * surrender_slice_prob(m, spec, t);
    }
  }
  return value;
}

PathOptimum pathwise_esssup(const PricingModel& model, std::size_t path,
                            const ParamBox& box, const OptimizerConfig& cfg) {
  box.validate();
  cfg.validate();
  const auto space = make_space(
      box, cfg.monotone_reduction && model.mortality_monotone(),
      Goal::Maximize);
  const auto best = optimize(
      [&](const Theta& theta) { return model.conditional_value(path, theta); },
      space, cfg, Goal::Maximize);
  return {path, best.value, best.argmax};
}

PathOptimum pathwise_esssup(const Path& path, const ParamBox& box,
                            const CopulaSpec& spec, const BenefitSpec& benefit,
                            const MarketParams& market,
                            const OptimizerConfig& cfg) {
  box.validate();
  cfg.validate();
  const bool pin = cfg.monotone_reduction && benefit.K >= 0.0;
  const auto space = make_space(box, pin, Goal::Maximize);
  const auto best = optimize(
      [&](const Theta& theta) {
        return conditional_value(path, theta, spec, benefit, market);
      },
      space, cfg, Goal::Maximize);
  return {path.index, best.value, best.argmax};
}

RobustPrice robust_price(const PricingModel& model, const ParamBox& box,
                         const OptimizerConfig& cfg) {
  box.validate();
  cfg.validate();
  RobustPrice out;
  out.per_path = parallel_map(model.paths().size(), [&](std::size_t i) {
    return pathwise_esssup(model, i, box, cfg);
  });
  for (std::size_t i = 0; i < out.per_path.size(); ++i) {
    out.price += model.paths()[i].q_weight * out.per_path[i].value;
  }
  return out;
}

RobustPrice robust_price(const ParamBox& box, const CopulaSpec& spec,
                         const BenefitSpec& benefit, const MarketParams& market,
                         const OptimizerConfig& cfg) {
  return robust_price(PricingModel(market, benefit, spec), box, cfg);
}

double classical_price(const Theta& theta, const CopulaSpec& spec,
                       const BenefitSpec& benefit, const MarketParams& market) {
  return PricingModel(market, benefit, spec).classical_price(theta);
}

Optimum sup_classical(const PricingModel& model, const ParamBox& box,
                      const OptimizerConfig& cfg) {
  box.validate();
  cfg.validate();
  const auto space = make_space(
      box, cfg.monotone_reduction && model.mortality_monotone(),
      Goal::Maximize);
  return optimize(
      [&](const Theta& theta) { return model.classical_price(theta); }, space,
      cfg, Goal::Maximize);
}

Optimum sup_classical(const ParamBox& box, const CopulaSpec& spec,
                      const BenefitSpec& benefit, const MarketParams& market,
                      const OptimizerConfig& cfg) {
  return sup_classical(PricingModel(market, benefit, spec), box, cfg);
}

Optimum inf_classical(const PricingModel& model, const ParamBox& box,
                      const OptimizerConfig& cfg) {
  box.validate();
  cfg.validate();
  const auto space = make_space(
      box, cfg.monotone_reduction && model.mortality_monotone(),
      Goal::Minimize);
  return optimize(
      [&](const Theta& theta) { return model.classical_price(theta); }, space,
      cfg, Goal::Minimize);
}

EvaluationReport evaluate(const PricingModel& model, const ParamBox& box,
                          const OptimizerConfig& cfg) {
  auto robust = robust_price(model, box, cfg);
  const auto outer = sup_classical(model, box, cfg);
  EvaluationReport report;
  report.robust_price = robust.price;
  report.sup_classical = outer.value;
  report.delta = robust.price - outer.value;
  report.per_path = std::move(robust.per_path);
  report.argmax_outer = outer.argmax;
  return report;
}

EvaluationReport evaluate(const ParamBox& box, const CopulaSpec& spec,
                          const BenefitSpec& benefit,
                          const MarketParams& market,
                          const OptimizerConfig& cfg) {
  return evaluate(PricingModel(market, benefit, spec), box, cfg);
}

std::optional<Theta> common_maximizer(const PricingModel& model,
                                      std::span<const PathOptimum> per_path,
                                      double tol) {
  for (const auto& candidate : per_path) {
    bool attains = true;
    for (const auto& p : per_path) {
      if (model.conditional_value(p.index, candidate.argmax) < p.value - tol) {
        attains = false;
        break;
      }
    }
    if (attains) return candidate.argmax;
  }
  return std::nullopt;
}

}  // namespace rifa
