#pragma once

#include <vector>

#include "rifa/lattice.hpp"

namespace rifa {

// Guarantee contract: V_t = max(S_t, K (1+r_G)^t); a surrender at t pays
// (1-l) V_t, survival to maturity pays V_T.
struct BenefitSpec {
  double K = 100.0;
  double r_G = 0.01;
  double l = 0.1;
  bool surrender_enabled = true;

  void validate() const;
  double guarantee(int t) const;  // K(t)
  friend bool operator==(const BenefitSpec&, const BenefitSpec&) = default;
};

// Discounted benefit amounts that multiply the survival and surrender
// indicators. surrender_pays has T+1 entries indexed by t; only t = 1..T-1
// are ever nonzero.
struct DiscountedPayoffs {
  double survival_pay = 0.0;
  std::vector<double> surrender_pays;
};

double guarantee_value(const BenefitSpec& spec, const Path& path, int t);

DiscountedPayoffs discounted_payoffs(const BenefitSpec& spec,
                                     const MarketParams& market,
                                     const Path& path);

}  // namespace rifa
