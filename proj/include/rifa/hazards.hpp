#pragma once

// Path-conditional distribution functions for the death time and the
// surrender time. All sums run over s = 0..t-1, so every CDF is 0 at t = 0
// and the value at t only depends on prices S_0..S_{t-1}.

#include <span>
#include <vector>

#include "rifa/lattice.hpp"

namespace rifa {

// One prior: reference price level a, Gompertz baseline b and growth c,
// surrender scale d.
struct Theta {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  void validate() const;
  friend bool operator==(const Theta&, const Theta&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool degenerate() const { return lo == hi; }
  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// The uncertainty hyper-rectangle over (a, b, c, d).
struct ParamBox {
  Interval a;
  Interval b;
  Interval c;
  Interval d;

  void validate() const;
  bool contains(const Theta& theta) const;
  Theta lower() const { return {a.lo, b.lo, c.lo, d.lo}; }
  Theta upper() const { return {a.hi, b.hi, c.hi, d.hi}; }
  static ParamBox point(const Theta& theta);
  friend bool operator==(const ParamBox&, const ParamBox&) = default;
};

// Cumulative hazard Lambda_0 = 0 <= Lambda_1 <= ... <= Lambda_T.
struct HazardPath {
  std::vector<double> cumulative;

  void validate() const;
};

// 1 - exp(-sum_{s<t} b e^{c s})
double gompertz_cdf(const Theta& theta, int t);

// 1 - exp(-(1/d) sum_{s<t} (a - S_s)^2)
double surrender_cdf(std::span<const double> prices, const Theta& theta,
                     int t);
double surrender_cdf(const Path& path, const Theta& theta, int t);

// 1 - exp(-gamma Lambda_t)
double cox_cdf(double gamma, const HazardPath& hazard, int t);

// Prefix sums of S and S^2 along one path. Lets the surrender exponent
// sum_{s<t} (a - S_s)^2 = t a^2 - 2 a sum S_s + sum S_s^2 be evaluated in
// O(1) for any a. Immutable after construction, so safe to share.
class SurrenderMoments {
 public:
  explicit SurrenderMoments(std::span<const double> prices);

  // sum_{s<t} (a - S_s)^2, clamped at zero against cancellation.
  double squared_deviation(double a, int t) const;

  int horizon() const { return static_cast<int>(sum_.size()) - 1; }

 private:
  std::vector<double> sum_;     // sum_[t] = sum_{s<t} S_s
  std::vector<double> sum_sq_;  // sum_sq_[t] = sum_{s<t} S_s^2
};

// Marginal conditional survival functions on t = 0..T for one (path, theta).
struct MarginalSurvivals {
  std::vector<double> death;      // 1 - F1(theta, t)
  std::vector<double> surrender;  // 1 - F2(theta, t); all ones if disabled
};

MarginalSurvivals marginal_survivals(const SurrenderMoments& moments,
                                     const Theta& theta, bool surrender_enabled);

}  // namespace rifa
