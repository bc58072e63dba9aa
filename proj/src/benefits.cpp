#include "rifa/benefits.hpp"

#include <algorithm>
#include <cmath>

#include "rifa/errors.hpp"

namespace rifa {

void BenefitSpec::validate() const {
  if (!(K >= 0.0) || !std::isfinite(K)) {
    throw ConfigError("benefit: K must be nonnegative");
  }
  if (!(r_G > -1.0) || !std::isfinite(r_G)) {
    throw ConfigError("benefit: r_G must exceed -1");
  }
  if (!(l >= 0.0 && l <= 1.0)) {
    throw ConfigError("benefit: penalty l must lie in [0, 1]");
  }
}

double BenefitSpec::guarantee(int t) const {
  return std::pow(1.0 + r_G, t) * K;
}

double guarantee_value(const BenefitSpec& spec, const Path& path, int t) {
  if (t < 0 || t > path.horizon()) {
    throw ContractError("guarantee_value: t outside [0, T]");
  }
  const double floor = spec.guarantee(t);
  return floor + std::max(path.prices[t] - floor, 0.0);
}

DiscountedPayoffs discounted_payoffs(const BenefitSpec& spec,
                                     const MarketParams& market,
                                     const Path& path) {
  const int T = path.horizon();
  DiscountedPayoffs out;
  out.survival_pay = guarantee_value(spec, path, T) / market.bank_account(T);
  out.surrender_pays.assign(T + 1, 0.0);
  if (spec.surrender_enabled) {
    for (int t = 1; t < T; ++t) {
      out.surrender_pays[t] = (1.0 - spec.l) * guarantee_value(spec, path, t) /
                              market.bank_account(t);
    }
  }
  return out;
}

}  // namespace rifa
