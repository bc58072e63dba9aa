#include "rifa/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "rifa/errors.hpp"

namespace rifa {

void MarketParams::validate() const {
  if (!(s0 > 0.0) || !std::isfinite(s0)) {
    throw ConfigError("market: s0 must be positive, got " + std::to_string(s0));
  }
  if (T < 1) {
    throw ConfigError("market: T must be at least 1");
  }
  if (!(v > -1.0 && v < r && r < u) || !std::isfinite(u)) {
    throw ConfigError("market: require -1 < v < r < u");
  }
}

double MarketParams::bank_account(int t) const {
  return std::pow(1.0 + r, t);
}

int Path::up_count() const {
  return static_cast<int>(std::count(moves.begin(), moves.end(), Move::Up));
}

RiskNeutral risk_neutral_probs(const MarketParams& market) {
  market.validate();
  const double spread = market.u - market.v;
  const double q_up = (market.r - market.v) / spread;
  return {q_up, 1.0 - q_up};
}

std::size_t path_count(const MarketParams& market) {
  if (market.T > kMaxHorizon) {
    throw ResourceError("lattice: T=" + std::to_string(market.T) +
                        " exceeds the enumeration cap of " +
                        std::to_string(kMaxHorizon));
  }
  return std::size_t{1} << market.T;
}

Path make_path(const MarketParams& market, std::size_t index) {
  const auto q = risk_neutral_probs(market);
  Path path;
  path.index = index;
  path.moves.resize(market.T);
  path.prices.resize(market.T + 1);
  path.prices[0] = market.s0;
  int ups = 0;
  for (int t = 0; t < market.T; ++t) {
    const bool up = (index >> t) & 1u;
    path.moves[t] = up ? Move::Up : Move::Down;
    ups += up ? 1 : 0;
    path.prices[t + 1] = path.prices[t] * (1.0 + (up ? market.u : market.v));
  }
  path.q_weight = std::pow(q.q_up, ups) * std::pow(q.q_down, market.T - ups);
  return path;
}

std::vector<Path> enumerate_paths(const MarketParams& market) {
  market.validate();
  const std::size_t n = path_count(market);
  std::vector<Path> paths;
  paths.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    paths.push_back(make_path(market, i));
  }
  return paths;
}

double binomial_call(const MarketParams& market, double strike) {
  if (strike < 0.0) {
    throw ContractError("binomial_call: strike must be nonnegative");
  }
  const auto q = risk_neutral_probs(market);
  double total = 0.0;
  double binom = 1.0;  // C(T, k), updated incrementally
  for (int k = 0; k <= market.T; ++k) {
    if (k > 0) {
      binom = binom * (market.T - k + 1) / k;
    }
    const double terminal = market.s0 * std::pow(1.0 + market.u, k) *
                            std::pow(1.0 + market.v, market.T - k);
    const double payoff = std::max(terminal - strike, 0.0);
    total += binom * std::pow(q.q_up, k) * std::pow(q.q_down, market.T - k) *
             payoff;
  }
  return total;
}

double discounted_node_price(const MarketParams& market, int t, int ups) {
  return market.s0 * std::pow(1.0 + market.u, ups) *
         std::pow(1.0 + market.v, t - ups) / market.bank_account(t);
}

double martingale_defect(const MarketParams& market) {
  const auto q = risk_neutral_probs(market);
  double worst = 0.0;
  for (int t = 0; t < market.T; ++t) {
    for (int k = 0; k <= t; ++k) {
      const double here = discounted_node_price(market, t, k);
      const double next = q.q_up * discounted_node_price(market, t + 1, k + 1) +
                          q.q_down * discounted_node_price(market, t + 1, k);
      worst = std::max(worst, std::abs(here - next));
    }
  }
  return worst;
}

double HedgeStrategy::holding(std::size_t path_index, int step) const {
  const std::size_t prefix = path_index & ((std::size_t{1} << step) - 1);
  return holdings.at(step).at(prefix);
}

double HedgeStrategy::gains(const MarketParams& market,
                            std::size_t path_index) const {
  double total = 0.0;
  int ups = 0;
  for (int t = 0; t < market.T; ++t) {
    const bool up = (path_index >> t) & 1u;
    const double before = discounted_node_price(market, t, ups);
    ups += up ? 1 : 0;
    const double after = discounted_node_price(market, t + 1, ups);
    total += holding(path_index, t) * (after - before);
  }
  return total;
}

Superhedge superhedge(const MarketParams& market, const Claim& claim) {
  const auto q = risk_neutral_probs(market);
  const std::size_t n = path_count(market);
  if (claim.values.size() != n) {
    throw ContractError("superhedge: claim has " +
                        std::to_string(claim.values.size()) +
                        " values, expected " + std::to_string(n));
  }
  for (double x : claim.values) {
    if (!std::isfinite(x)) {
      throw ContractError("superhedge: claim value is not finite");
    }
  }

  Superhedge result;
  result.strategy.holdings.resize(market.T);

  // value[prefix] holds the replicating value at depth t; at depth T the
  // prefix is the full path index.
  std::vector<double> value = claim.values;
  for (int t = market.T - 1; t >= 0; --t) {
    const std::size_t width = std::size_t{1} << t;
    std::vector<double> parent(width);
    auto& xi = result.strategy.holdings[t];
    xi.resize(width);
    for (std::size_t prefix = 0; prefix < width; ++prefix) {
      const int ups = std::popcount(prefix);
      const double s_up = discounted_node_price(market, t + 1, ups + 1);
      const double s_down = discounted_node_price(market, t + 1, ups);
      const double v_up = value[prefix | width];
      const double v_down = value[prefix];
      xi[prefix] = (v_up - v_down) / (s_up - s_down);
      parent[prefix] = q.q_up * v_up + q.q_down * v_down;
    }
    value = std::move(parent);
  }
  result.cost = value.front();
  return result;
}

double expectation(std::span<const Path> paths,
                   std::span<const double> values) {
  if (values.size() != paths.size()) {
    throw ContractError("expectation: value count does not match path count");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    total += paths[i].q_weight * values[i];
  }
  return total;
}

}  // namespace rifa
