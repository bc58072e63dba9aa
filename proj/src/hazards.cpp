#include "rifa/hazards.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rifa/errors.hpp"

namespace rifa {

void Theta::validate() const {
  if (!(b > 0.0 && c > 0.0 && d > 0.0) || !std::isfinite(a)) {
    throw ConfigError("theta: require b > 0, c > 0, d > 0 and finite a");
  }
}

namespace {

void check_interval(const Interval& iv, const char* name, bool positive) {
  if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
    throw ConfigError(std::string("theta_box: interval ") + name +
                      " must satisfy lo <= hi");
  }
  if (positive && !(iv.lo > 0.0)) {
    throw ConfigError(std::string("theta_box: lower bound of ") + name +
                      " must be positive");
  }
}

}  // namespace

void ParamBox::validate() const {
  check_interval(a, "a", false);
  check_interval(b, "b", true);
  check_interval(c, "c", true);
  check_interval(d, "d", true);
}

bool ParamBox::contains(const Theta& theta) const {
  return a.contains(theta.a) && b.contains(theta.b) && c.contains(theta.c) &&
         d.contains(theta.d);
}

ParamBox ParamBox::point(const Theta& theta) {
  return {{theta.a, theta.a}, {theta.b, theta.b}, {theta.c, theta.c},
          {theta.d, theta.d}};
}

void HazardPath::validate() const {
  if (cumulative.empty() || cumulative.front() != 0.0) {
    throw ContractError("hazard path must start at 0");
  }
  for (std::size_t i = 1; i < cumulative.size(); ++i) {
    if (!(cumulative[i] >= cumulative[i - 1])) {
      throw ContractError("hazard path must be nondecreasing");
    }
  }
}

double gompertz_cdf(const Theta& theta, int t) {
  double exponent = 0.0;
  for (int s = 0; s < t; ++s) {
    exponent += theta.b * std::exp(theta.c * s);
  }
  return -std::expm1(-exponent);
}

double surrender_cdf(std::span<const double> prices, const Theta& theta,
                     int t) {
  if (t < 0 || static_cast<std::size_t>(t) > prices.size()) {
    throw ContractError("surrender_cdf: t outside the available price prefix");
  }
  double exponent = 0.0;
  for (int s = 0; s < t; ++s) {
    const double dev = theta.a - prices[s];
    exponent += dev * dev;
  }
  return -std::expm1(-exponent / theta.d);
}

double surrender_cdf(const Path& path, const Theta& theta, int t) {
  if (t > path.horizon()) {
    throw ContractError("surrender_cdf: t beyond horizon");
  }
  return surrender_cdf(std::span<const double>(path.prices), theta, t);
}

double cox_cdf(double gamma, const HazardPath& hazard, int t) {
  if (t < 0 || static_cast<std::size_t>(t) >= hazard.cumulative.size()) {
    throw ContractError("cox_cdf: t outside the hazard path");
  }
  if (!(gamma > 0.0)) {
    throw ContractError("cox_cdf: gamma must be positive");
  }
  hazard.validate();
  return -std::expm1(-gamma * hazard.cumulative[t]);
}

SurrenderMoments::SurrenderMoments(std::span<const double> prices)
    : sum_(prices.size(), 0.0), sum_sq_(prices.size(), 0.0) {
  // Only S_0..S_{T-1} ever enter, so prices of length T+1 give T+1 prefixes.
  for (std::size_t s = 1; s < prices.size(); ++s) {
    sum_[s] = sum_[s - 1] + prices[s - 1];
    sum_sq_[s] = sum_sq_[s - 1] + prices[s - 1] * prices[s - 1];
  }
}

double SurrenderMoments::squared_deviation(double a, int t) const {
  const double value = t * a * a - 2.0 * a * sum_[t] + sum_sq_[t];
  return std::max(value, 0.0);
}

MarginalSurvivals marginal_survivals(const SurrenderMoments& moments,
                                     const Theta& theta,
                                     bool surrender_enabled) {
  const int horizon = moments.horizon();
  MarginalSurvivals out;
  out.death.resize(horizon + 1);
  out.surrender.assign(horizon + 1, 1.0);
  double death_exponent = 0.0;
  out.death[0] = 1.0;
  for (int t = 1; t <= horizon; ++t) {
    death_exponent += theta.b * std::exp(theta.c * (t - 1));
    out.death[t] = std::exp(-death_exponent);
    if (surrender_enabled) {
      out.surrender[t] =
          std::exp(-moments.squared_deviation(theta.a, t) / theta.d);
    }
  }
  return out;
}

}  // namespace rifa
