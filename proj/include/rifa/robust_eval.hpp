#pragma once

// Robust and classical two-step prices of the surrender/survival benefit.
//
// The priors P^theta share the F-nullsets and the atoms of F_T are the 2^T
// lattice paths, so the essential supremum over priors is an ordinary
// maximum over the parameter box, taken path by path.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rifa/benefits.hpp"
#include "rifa/copulas.hpp"
#include "rifa/hazards.hpp"
#include "rifa/lattice.hpp"

namespace rifa {

enum class OptimizerMethod { NelderMead, Grid, Hybrid };

std::string_view to_string(OptimizerMethod method);
OptimizerMethod parse_optimizer_method(std::string_view name);

struct OptimizerConfig {
  OptimizerMethod method = OptimizerMethod::Hybrid;
  int grid_points_per_dim = 64;
  int multistarts = 5;
  double tolerance = 1e-8;
  int max_iters = 500;
  // Pin b and c at the corner that the mortality monotonicity certifies.
  bool monotone_reduction = true;

  void validate() const;
  friend bool operator==(const OptimizerConfig&,
                         const OptimizerConfig&) = default;
};

struct PathOptimum {
  std::size_t index = 0;
  double value = 0.0;
  Theta argmax;
};

struct Optimum {
  double value = 0.0;
  Theta argmax;
};

struct RobustPrice {
  double price = 0.0;
  std::vector<PathOptimum> per_path;
};

struct EvaluationReport {
  double robust_price = 0.0;
  double sup_classical = 0.0;
  double delta = 0.0;
  std::vector<PathOptimum> per_path;
  Theta argmax_outer;
};

// Per-path quantities that do not depend on theta, built once per
// configuration and shared read-only between threads.
class PricingModel {
 public:
  PricingModel(const MarketParams& market, const BenefitSpec& benefit,
               const CopulaSpec& copula);

  const MarketParams& market() const { return market_; }
  const BenefitSpec& benefit() const { return benefit_; }
  const CopulaSpec& copula() const { return copula_; }
  const std::vector<Path>& paths() const { return paths_; }
  const DiscountedPayoffs& payoffs(std::size_t i) const { return payoffs_[i]; }

  MarginalSurvivals marginals(std::size_t path, const Theta& theta) const;

  // G(path, theta) = E_{P^theta}[X | F] on the given path.
  double conditional_value(std::size_t path, const Theta& theta) const;

  // sum_paths q_weight * G(path, theta)
  double classical_price(const Theta& theta) const;

  // True when G is certified nonincreasing in b and c: payoffs are
  // nonnegative and the copula does not depend on theta, so raising either
  // Gompertz parameter lowers every death survival and, by 2-increasingness
  // of the survival copula, every term of G.
  bool mortality_monotone() const;

 private:
  MarketParams market_;
  BenefitSpec benefit_;
  CopulaSpec copula_;
  std::vector<Path> paths_;
  std::vector<SurrenderMoments> moments_;
  std::vector<DiscountedPayoffs> payoffs_;
};

double conditional_value(const Path& path, const Theta& theta,
                         const CopulaSpec& spec, const BenefitSpec& benefit,
                         const MarketParams& market);

PathOptimum pathwise_esssup(const PricingModel& model, std::size_t path,
                            const ParamBox& box, const OptimizerConfig& cfg);
PathOptimum pathwise_esssup(const Path& path, const ParamBox& box,
                            const CopulaSpec& spec, const BenefitSpec& benefit,
                            const MarketParams& market,
                            const OptimizerConfig& cfg);

RobustPrice robust_price(const PricingModel& model, const ParamBox& box,
                         const OptimizerConfig& cfg);
RobustPrice robust_price(const ParamBox& box, const CopulaSpec& spec,
                         const BenefitSpec& benefit, const MarketParams& market,
                         const OptimizerConfig& cfg);

double classical_price(const Theta& theta, const CopulaSpec& spec,
                       const BenefitSpec& benefit, const MarketParams& market);

Optimum sup_classical(const PricingModel& model, const ParamBox& box,
                      const OptimizerConfig& cfg);
Optimum sup_classical(const ParamBox& box, const CopulaSpec& spec,
                      const BenefitSpec& benefit, const MarketParams& market,
                      const OptimizerConfig& cfg);

// Minimum of the classical price over the box (condition (i) of the
// no-arbitrage characterization).
Optimum inf_classical(const PricingModel& model, const ParamBox& box,
                      const OptimizerConfig& cfg);

EvaluationReport evaluate(const PricingModel& model, const ParamBox& box,
                          const OptimizerConfig& cfg);
EvaluationReport evaluate(const ParamBox& box, const CopulaSpec& spec,
                          const BenefitSpec& benefit,
                          const MarketParams& market,
                          const OptimizerConfig& cfg);

// A theta that attains the per-path maximum on every path (within tol), if
// one of the reported per-path maximizers does. Its existence means the
// family of conditional values is directed upwards at its maximum and the
// robust price equals the worst-case classical price.
std::optional<Theta> common_maximizer(const PricingModel& model,
                                      std::span<const PathOptimum> per_path,
                                      double tol);

}  // namespace rifa
