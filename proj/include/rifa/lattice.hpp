#pragma once

// Cox-Ross-Rubinstein binomial market.
//
// Paths are indexed in binary: bit t of the index is set when the price
// moves up at step t+1. All claims handed to the replication routines are
// expressed in discounted units (divided by (1+r)^t).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rifa {

struct MarketParams {
  double s0 = 100.0;
  double u = 0.1;
  double v = -0.1;
  double r = 0.05;
  int T = 8;

  // Throws ConfigError unless s0 > 0, T >= 1 and -1 < v < r < u.
  void validate() const;

  // (1+r)^t
  double bank_account(int t) const;

  friend bool operator==(const MarketParams&, const MarketParams&) = default;
};

inline constexpr int kMaxHorizon = 24;

enum class Move : std::uint8_t { Down = 0, Up = 1 };

struct RiskNeutral {
  double q_up;
  double q_down;
};

struct Path {
  std::size_t index = 0;
  std::vector<Move> moves;     // length T
  std::vector<double> prices;  // S_0..S_T, undiscounted
  double q_weight = 0.0;

  int horizon() const { return static_cast<int>(moves.size()); }
  int up_count() const;
};

// Discounted payoff per path, indexed by path index.
struct Claim {
  std::vector<double> values;
};

RiskNeutral risk_neutral_probs(const MarketParams& market);

std::size_t path_count(const MarketParams& market);

// Builds one path from its binary index.
Path make_path(const MarketParams& market, std::size_t index);

// All 2^T paths in ascending index order. Throws ResourceError for T > 24.
std::vector<Path> enumerate_paths(const MarketParams& market);

// E_Q[(S_T - strike)^+], undiscounted, by the closed binomial sum.
double binomial_call(const MarketParams& market, double strike);

// Self-financing strategy on the (non-recombining) binary tree.
// holdings[t][prefix] is the number of shares held over step t+1, chosen
// from the first t moves; prefix uses the same bit convention as paths.
struct HedgeStrategy {
  std::vector<std::vector<double>> holdings;

  double holding(std::size_t path_index, int step) const;

  // Discounted gains (xi . S)_T along a path.
  double gains(const MarketParams& market, std::size_t path_index) const;
};

struct Superhedge {
  double cost = 0.0;
  HedgeStrategy strategy;
};

// Backward-induction replication of a discounted F_T-measurable claim.
// The market is complete, so the superhedge replicates exactly:
// cost + (xi . S)_T == claim on every path.
Superhedge superhedge(const MarketParams& market, const Claim& claim);

// Discounted price S_t / (1+r)^t at the node reached after `ups` up-moves in
// t steps.
double discounted_node_price(const MarketParams& market, int t, int ups);

// Largest violation of S~_t = q_u S~_{t+1}^up + q_d S~_{t+1}^down over all
// recombining nodes.
double martingale_defect(const MarketParams& market);

// Sum over paths of q_weight * values[index], accumulated in index order.
double expectation(std::span<const Path> paths, std::span<const double> values);

}  // namespace rifa
