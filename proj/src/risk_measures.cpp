#include "rifa/risk_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rifa/errors.hpp"

namespace rifa {

namespace {

constexpr double kMassTolerance = 1e-12;

void check_values(const FiniteCondSpace& space, std::span<const double> x) {
  space.validate();
  if (x.size() != space.atoms.size()) {
    throw ContractError("risk measure: one value per atom required");
  }
}

// Block-conditional losses -X in block order.
std::vector<double> block_losses(const FiniteCondSpace& space,
                                 std::span<const double> x, std::size_t k) {
  std::vector<double> losses;
  losses.reserve(space.blocks[k].size());
  for (std::size_t atom : space.blocks[k]) losses.push_back(-x[atom]);
  return losses;
}

double mean(std::span<const double> p, std::span<const double> v) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += p[i] * v[i];
  return total;
}

double greedy_avar(std::span<const double> p, std::span<const double> loss,
                   double lambda) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return loss[i] > loss[j];
  });
  double remaining = 1.0;
  double value = 0.0;
  for (std::size_t i : order) {
    if (remaining <= 0.0) break;
    const double mass = std::min(p[i] / lambda, remaining);
    value += mass * loss[i];
    remaining -= mass;
  }
  return value;
}

double vertex_avar(std::span<const double> p, std::span<const double> loss,
                   double lambda) {
  const std::size_t n = p.size();
  std::vector<double> cap(n);
  for (std::size_t i = 0; i < n; ++i) cap[i] = p[i] / lambda;
  double best = -std::numeric_limits<double>::infinity();
  // A vertex has every coordinate but (at most) one at a bound; the free
  // coordinate absorbs the remaining mass.
  for (std::size_t free = 0; free < n; ++free) {
    const std::size_t subsets = std::size_t{1} << (n - 1);
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      double mass = 0.0;
      double value = 0.0;
      std::size_t bit = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == free) continue;
        if ((mask >> bit++) & 1u) {
          mass += cap[i];
          value += cap[i] * loss[i];
        }
      }
      const double rest = 1.0 - mass;
      if (rest < -kMassTolerance || rest > cap[free] + kMassTolerance) continue;
      best = std::max(best, value + rest * loss[free]);
    }
  }
  return best;
}

struct Tilt {
  double entropy;
  double value;
};

// Gibbs tilt q ~ p exp(beta (loss - max)); returns H(q|p) and E_q[loss].
Tilt gibbs(std::span<const double> p, std::span<const double> loss,
           double top, double beta) {
  double z = 0.0;
  double shifted_mean = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double w = p[i] * std::exp(beta * (loss[i] - top));
    z += w;
    shifted_mean += w * (loss[i] - top);
  }
  shifted_mean /= z;
  return {beta * shifted_mean - std::log(z), top + shifted_mean};
}

double entropic_block(std::span<const double> p, std::span<const double> loss,
                      double c) {
  const double top = *std::max_element(loss.begin(), loss.end());
  const double bottom = *std::min_element(loss.begin(), loss.end());
  if (top == bottom) return top;
  if (c == 0.0) return mean(p, loss);

  double top_mass = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (loss[i] == top) top_mass += p[i];
  }
  // The conditional law restricted to the worst atoms is the most extreme
  // admissible measure; its entropy is -log P[worst].
  if (c >= -std::log(top_mass)) return top;

  const double scale = 1.0 / (top - bottom);
  double lo = 0.0;
  double hi = scale;
  int doublings = 0;
  while (gibbs(p, loss, top, hi).entropy < c) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 1100) {
      throw NumericalFailure("entropic_sup: no bracketing tilt found",
                             gibbs(p, loss, top, lo).value);
    }
  }
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (gibbs(p, loss, top, mid).entropy < c ? lo : hi) = mid;
  }
  const auto at_lo = gibbs(p, loss, top, lo);
  const auto at_hi = gibbs(p, loss, top, hi);
  if (std::abs(at_hi.entropy - c) > 1e-9 * std::max(1.0, c) &&
      std::abs(at_lo.entropy - c) > 1e-9 * std::max(1.0, c)) {
    throw NumericalFailure("entropic_sup: bisection did not converge",
                           at_lo.value);
  }
  // lo always satisfies the entropy budget.
  return at_lo.value;
}

}  // namespace

void FiniteCondSpace::validate() const {
  if (atoms.empty()) {
    throw ContractError("finite space: no atoms");
  }
  double total = 0.0;
  for (const auto& atom : atoms) {
    if (!(atom.probability > 0.0)) {
      throw ContractError("finite space: atom '" + atom.label +
                          "' needs positive probability");
    }
    total += atom.probability;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ContractError("finite space: probabilities must sum to 1");
  }
  std::vector<int> seen(atoms.size(), 0);
  for (const auto& block : blocks) {
    if (block.empty()) {
      throw ContractError("finite space: empty block");
    }
    for (std::size_t atom : block) {
      if (atom >= atoms.size()) {
        throw ContractError("finite space: block refers to unknown atom");
      }
      ++seen[atom];
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](int n) { return n != 1; })) {
    throw ContractError("finite space: every atom must lie in exactly one block");
  }
}

double FiniteCondSpace::block_mass(std::size_t block) const {
  double mass = 0.0;
  for (std::size_t atom : blocks.at(block)) mass += atoms[atom].probability;
  return mass;
}

std::vector<double> FiniteCondSpace::conditional_probs(std::size_t block) const {
  const double mass = block_mass(block);
  std::vector<double> p;
  p.reserve(blocks[block].size());
  for (std::size_t atom : blocks[block]) {
    p.push_back(atoms[atom].probability / mass);
  }
  return p;
}

CondRiskValue cond_expectation(const FiniteCondSpace& space,
                               std::span<const double> x) {
  check_values(space, x);
  CondRiskValue out;
  for (std::size_t k = 0; k < space.blocks.size(); ++k) {
    const auto p = space.conditional_probs(k);
    std::vector<double> values;
    for (std::size_t atom : space.blocks[k]) values.push_back(x[atom]);
    out.values.push_back(mean(p, values));
  }
  return out;
}

CondRiskValue cond_avar(const FiniteCondSpace& space,
                        std::span<const double> x, double lambda) {
  check_values(space, x);
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ContractError("cond_avar: lambda must lie in (0, 1]");
  }
  CondRiskValue out;
  for (std::size_t k = 0; k < space.blocks.size(); ++k) {
    const auto p = space.conditional_probs(k);
    const auto loss = block_losses(space, x, k);
    out.values.push_back(lambda == 1.0 ? mean(p, loss)
                                       : greedy_avar(p, loss, lambda));
  }
  return out;
}

CondRiskValue avar_robust_oracle(const FiniteCondSpace& space,
                                 std::span<const double> x, double lambda) {
  check_values(space, x);
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ContractError("avar_robust_oracle: lambda must lie in (0, 1]");
  }
  CondRiskValue out;
  for (std::size_t k = 0; k < space.blocks.size(); ++k) {
    if (space.blocks[k].size() > kMaxOracleBlock) {
      throw ResourceError("avar_robust_oracle: block exceeds " +
                          std::to_string(kMaxOracleBlock) + " atoms");
    }
    const auto p = space.conditional_probs(k);
    const auto loss = block_losses(space, x, k);
    out.values.push_back(vertex_avar(p, loss, lambda));
  }
  return out;
}

CondRiskValue entropic_sup(const FiniteCondSpace& space,
                           std::span<const double> x, double c) {
  check_values(space, x);
  if (!(c >= 0.0)) {
    throw ContractError("entropic_sup: entropy budget must be nonnegative");
  }
  CondRiskValue out;
  for (std::size_t k = 0; k < space.blocks.size(); ++k) {
    const auto p = space.conditional_probs(k);
    const auto loss = block_losses(space, x, k);
    out.values.push_back(entropic_block(p, loss, c));
  }
  return out;
}

double two_step(const FiniteCondSpace& space,
                std::span<const double> q_block_weights,
                const CondRiskValue& rho) {
  if (q_block_weights.size() != space.blocks.size() ||
      rho.values.size() != space.blocks.size()) {
    throw ContractError("two_step: one weight and one value per block required");
  }
  double total_weight = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < q_block_weights.size(); ++k) {
    if (q_block_weights[k] < 0.0) {
      throw ContractError("two_step: negative block weight");
    }
    total_weight += q_block_weights[k];
    total += q_block_weights[k] * rho.values[k];
  }
  if (std::abs(total_weight - 1.0) > kMassTolerance) {
    throw ContractError("two_step: block weights must sum to 1");
  }
  return total;
}

}  // namespace rifa
