#pragma once

// Conditional coherent risk measures on a finite probability space whose
// conditioning sigma-algebra is generated by a partition into blocks.
//
// Sign convention: every routine returns rho(X) = sup E_{P~}[-X | block], so a
// price is obtained as two_step(..., rho(-X)).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rifa {

struct Atom {
  std::string label;
  double probability = 0.0;
};

struct FiniteCondSpace {
  std::vector<Atom> atoms;
  std::vector<std::vector<std::size_t>> blocks;  // atom indices per block

  // Throws ContractError on bad probabilities or an invalid partition.
  void validate() const;
  double block_mass(std::size_t block) const;
  // P[atom | block] for every atom in the block, in block order.
  std::vector<double> conditional_probs(std::size_t block) const;
};

// One value per partition block.
struct CondRiskValue {
  std::vector<double> values;
};

inline constexpr std::size_t kMaxOracleBlock = 12;

// E[X | block]
CondRiskValue cond_expectation(const FiniteCondSpace& space,
                               std::span<const double> x);

// Conditional average value at risk at level lambda in (0, 1]: the worst
// conditional expectation of -X over densities bounded by 1/lambda, via the
// sorted greedy fill of the largest losses.
CondRiskValue cond_avar(const FiniteCondSpace& space,
                        std::span<const double> x, double lambda);

// Brute-force counterpart of cond_avar: enumerates every vertex of the
// polytope {q : 0 <= q_i <= p_i / lambda, sum q_i = 1} per block. Throws
// ResourceError for blocks above kMaxOracleBlock atoms.
CondRiskValue avar_robust_oracle(const FiniteCondSpace& space,
                                 std::span<const double> x, double lambda);

// Worst conditional expectation of -X over the relative-entropy ball
// H(P~ | P) <= c (natural log), solved on the Gibbs-tilt family.
CondRiskValue entropic_sup(const FiniteCondSpace& space,
                           std::span<const double> x, double c);

// sum_blocks q_weight * rho
double two_step(const FiniteCondSpace& space,
                std::span<const double> q_block_weights,
                const CondRiskValue& rho);

}  // namespace rifa
