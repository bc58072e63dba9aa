#pragma once

// Bivariate copulas coupling the death and surrender times conditionally on
// the market path, and the joint conditional laws built from them.

#include <string>
#include <string_view>
#include <utility>

#include "rifa/hazards.hpp"
#include "rifa/rng.hpp"

namespace rifa {

enum class CopulaFamily { Independence, Clayton, Gumbel, Frank };

std::string_view to_string(CopulaFamily family);
// Case-insensitive; throws ConfigError for unknown names.
CopulaFamily parse_copula_family(std::string_view name);

// Parameter conventions: Clayton alpha > 0, Gumbel beta >= 1, Frank
// delta != 0. Independence ignores the parameter.
struct CopulaSpec {
  CopulaFamily family = CopulaFamily::Independence;
  double param = 0.0;

  void validate() const;
  friend bool operator==(const CopulaSpec&, const CopulaSpec&) = default;
};

// C(u, v). Throws ContractError when u or v lies outside [0, 1].
double copula_eval(const CopulaSpec& spec, double u, double v);

// Survival copula u + v - 1 + C(1-u, 1-v).
double survival_transform(const CopulaSpec& spec, double u, double v);

// dC/du (u, v), i.e. the conditional CDF of V given U = u.
double copula_conditional_cdf(const CopulaSpec& spec, double u, double v);

// Solves dC/du(u, v) = w for v: closed forms for Independence, Clayton and
// Frank, bisection to 1e-10 for Gumbel.
double copula_conditional_inverse(const CopulaSpec& spec, double u, double w);

// One draw (U, V) ~ C by conditional inversion.
std::pair<double, double> sample_pair(const CopulaSpec& spec, Rng& rng);

// P[tau1 > s, tau2 > t | F] from precomputed marginal survivals.
double joint_survival(const MarginalSurvivals& marginals,
                      const CopulaSpec& spec, int s, int t);

// P[tau1 > t, tau2 = t | F] for 1 <= t <= T. Throws NumericalFailure when the
// value is below -1e-12, which would mean the copula is not 2-increasing.
double surrender_slice_prob(const MarginalSurvivals& marginals,
                            const CopulaSpec& spec, int t);

double joint_survival(const Path& path, const Theta& theta,
                      const CopulaSpec& spec, int s, int t,
                      bool surrender_enabled = true);

double surrender_slice_prob(const Path& path, const Theta& theta,
                            const CopulaSpec& spec, int t,
                            bool surrender_enabled = true);

}  // namespace rifa
