#include "rifa/copulas.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "rifa/errors.hpp"

namespace rifa {

namespace {

constexpr double kFrankIndependenceBand = 1e-10;
constexpr double kSliceTolerance = 1e-12;
constexpr double kBisectionTolerance = 1e-10;

bool acts_as_independence(const CopulaSpec& spec) {
  switch (spec.family) {
    case CopulaFamily::Independence:
      return true;
    case CopulaFamily::Gumbel:
      return spec.param == 1.0;
    case CopulaFamily::Frank:
      return std::abs(spec.param) <= kFrankIndependenceBand;
    case CopulaFamily::Clayton:
      return false;
  }
  return false;
}

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ContractError(std::string("copula: argument ") + what +
                        " outside [0, 1]");
  }
}

double clayton(double alpha, double u, double v) {
  const double s = std::pow(u, -alpha) + std::pow(v, -alpha) - 1.0;
  return std::pow(s, -1.0 / alpha);
}

double gumbel(double beta, double u, double v) {
  const double x = -std::log(u);
  const double y = -std::log(v);
  const double a = std::pow(std::pow(x, beta) + std::pow(y, beta), 1.0 / beta);
  return std::exp(-a);
}

double frank(double delta, double u, double v) {
  const double num = std::expm1(-delta * u) * std::expm1(-delta * v);
  return -std::log1p(num / std::expm1(-delta)) / delta;
}

double gumbel_conditional(double beta, double u, double v) {
  const double x = -std::log(u);
  const double y = -std::log(v);
  const double sum = std::pow(x, beta) + std::pow(y, beta);
  const double a = std::pow(sum, 1.0 / beta);
  return std::exp(-a) * std::pow(a, 1.0 - beta) * std::pow(x, beta - 1.0) / u;
}

}  // namespace

std::string_view to_string(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::Independence:
      return "independence";
    case CopulaFamily::Clayton:
      return "clayton";
    case CopulaFamily::Gumbel:
      return "gumbel";
    case CopulaFamily::Frank:
      return "frank";
  }
  return "unknown";
}

CopulaFamily parse_copula_family(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  for (auto family : {CopulaFamily::Independence, CopulaFamily::Clayton,
                      CopulaFamily::Gumbel, CopulaFamily::Frank}) {
    if (lower == to_string(family)) return family;
  }
  throw ConfigError("copula: unknown family '" + std::string(name) + "'");
}

void CopulaSpec::validate() const {
  switch (family) {
    case CopulaFamily::Independence:
      return;
    case CopulaFamily::Clayton:
      if (!(param > 0.0) || !std::isfinite(param)) {
        throw ConfigError("copula: Clayton requires alpha > 0");
      }
      return;
    case CopulaFamily::Gumbel:
      if (!(param >= 1.0) || !std::isfinite(param)) {
        throw ConfigError("copula: Gumbel requires beta >= 1");
      }
      return;
    case CopulaFamily::Frank:
      if (param == 0.0 || !std::isfinite(param)) {
        throw ConfigError("copula: Frank requires delta != 0");
      }
      return;
  }
}

double copula_eval(const CopulaSpec& spec, double u, double v) {
  check_unit(u, "u");
  check_unit(v, "v");
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  if (acts_as_independence(spec)) return u * v;
  double c = 0.0;
  switch (spec.family) {
    case CopulaFamily::Clayton:
      c = clayton(spec.param, u, v);
      break;
    case CopulaFamily::Gumbel:
      c = gumbel(spec.param, u, v);
      break;
    case CopulaFamily::Frank:
      c = frank(spec.param, u, v);
      break;
    case CopulaFamily::Independence:
      break;
  }
  // Rounding can push the closed forms a few ulps past the Frechet bounds.
  return std::clamp(c, std::max(u + v - 1.0, 0.0), std::min(u, v));
}

double survival_transform(const CopulaSpec& spec, double u, double v) {
  check_unit(u, "u");
  check_unit(v, "v");
  if (acts_as_independence(spec)) return u * v;
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  const double value = u + v - 1.0 + copula_eval(spec, 1.0 - u, 1.0 - v);
  return std::clamp(value, std::max(u + v - 1.0, 0.0), std::min(u, v));
}

double copula_conditional_cdf(const CopulaSpec& spec, double u, double v) {
  check_unit(u, "u");
  check_unit(v, "v");
  if (v == 0.0) return 0.0;
  if (v == 1.0) return 1.0;
  if (acts_as_independence(spec)) return v;
  switch (spec.family) {
    case CopulaFamily::Clayton: {
      if (u == 0.0) return 1.0;
      const double alpha = spec.param;
      const double s = std::pow(u, -alpha) + std::pow(v, -alpha) - 1.0;
      return std::pow(u, -alpha - 1.0) * std::pow(s, -1.0 / alpha - 1.0);
    }
    case CopulaFamily::Gumbel:
      if (u == 0.0) return 1.0;
      if (u == 1.0) return 0.0;
      return gumbel_conditional(spec.param, u, v);
    case CopulaFamily::Frank: {
      const double delta = spec.param;
      const double ev = std::expm1(-delta * v);
      return std::exp(-delta * u) * ev /
             (std::expm1(-delta) + std::expm1(-delta * u) * ev);
    }
    case CopulaFamily::Independence:
      break;
  }
  return v;
}

double copula_conditional_inverse(const CopulaSpec& spec, double u, double w) {
  check_unit(u, "u");
  check_unit(w, "w");
  if (acts_as_independence(spec)) return w;
  switch (spec.family) {
    case CopulaFamily::Clayton: {
      const double alpha = spec.param;
      const double inner =
          (std::pow(w, -alpha / (1.0 + alpha)) - 1.0) * std::pow(u, -alpha) +
          1.0;
      return std::clamp(std::pow(inner, -1.0 / alpha), 0.0, 1.0);
    }
    case CopulaFamily::Frank: {
      const double delta = spec.param;
      const double ratio =
          w * std::expm1(-delta) / (w + (1.0 - w) * std::exp(-delta * u));
      return std::clamp(-std::log1p(ratio) / delta, 0.0, 1.0);
    }
    case CopulaFamily::Gumbel: {
      double lo = 0.0;
      double hi = 1.0;
      for (int iter = 0; iter < 200 && hi - lo > kBisectionTolerance; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double h = copula_conditional_cdf(spec, u, mid);
        if (!std::isfinite(h)) {
          throw NumericalFailure("copula: conditional CDF not finite", mid);
        }
        (h < w ? lo : hi) = mid;
      }
      if (hi - lo > kBisectionTolerance) {
        throw NumericalFailure("copula: bisection did not converge",
                               0.5 * (lo + hi));
      }
      return 0.5 * (lo + hi);
    }
    case CopulaFamily::Independence:
      break;
  }
  return w;
}

std::pair<double, double> sample_pair(const CopulaSpec& spec, Rng& rng) {
  const double u = rng.uniform();
  const double w = rng.uniform();
  return {u, copula_conditional_inverse(spec, u, w)};
}

double joint_survival(const MarginalSurvivals& marginals,
                      const CopulaSpec& spec, int s, int t) {
  return survival_transform(spec, marginals.death.at(s),
                            marginals.surrender.at(t));
}

double surrender_slice_prob(const MarginalSurvivals& marginals,
                            const CopulaSpec& spec, int t) {
  if (t < 1) {
    throw ContractError("surrender_slice_prob: t must be at least 1");
  }
  const double alive = marginals.death.at(t);
  const double value =
      survival_transform(spec, alive, marginals.surrender.at(t - 1)) -
      survival_transform(spec, alive, marginals.surrender.at(t));
  if (value < -kSliceTolerance) {
    throw NumericalFailure("surrender_slice_prob: negative slice probability",
                           value);
  }
  return std::max(value, 0.0);
}

double joint_survival(const Path& path, const Theta& theta,
                      const CopulaSpec& spec, int s, int t,
                      bool surrender_enabled) {
  const SurrenderMoments moments(path.prices);
  return joint_survival(marginal_survivals(moments, theta, surrender_enabled),
                        spec, s, t);
}

double surrender_slice_prob(const Path& path, const Theta& theta,
                            const CopulaSpec& spec, int t,
                            bool surrender_enabled) {
  const SurrenderMoments moments(path.prices);
  return surrender_slice_prob(
      marginal_survivals(moments, theta, surrender_enabled), spec, t);
}

}  // namespace rifa
