#pragma once

// No-arbitrage verdicts for a single-premium contract, the explicit
// hedge-plus-averaging arbitrage when the premium is too high, and Monte Carlo
// portfolios of policyholders that are iid given the market path.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rifa/robust_eval.hpp"

namespace rifa {

// Comparisons of the premium against the two price bounds use this band.
inline constexpr double kVerdictBand = 1e-9;

enum class VerdictStatus { NrifaByI, NrifaByII, RifaExists };

std::string_view to_string(VerdictStatus status);

struct Verdict {
  VerdictStatus status = VerdictStatus::RifaExists;
  double premium = 0.0;
  double robust_price = 0.0;
  double inf_classical = 0.0;
  Theta inf_argmax;        // theta' attaining the classical infimum
  double margin_i = 0.0;   // inf_classical - premium; (i) holds iff >= -band
  double margin_ii = 0.0;  // robust_price - premium; (ii) holds iff > band
  // premium within the band of robust_price: the arbitrage only exists in
  // the non-strict sense and a strictly profitable prior is not asserted.
  bool boundary = false;
};

// Condition (i): premium <= min_theta classical price. Condition (ii):
// premium < robust price. (i) is checked first.
Verdict nrifa_check(double premium, const EvaluationReport& report,
                    const PricingModel& model, const ParamBox& box,
                    const OptimizerConfig& cfg);

struct ArbitragePair {
  double premium = 0.0;
  Claim claim;        // pathwise esssup value, discounted
  Superhedge hedge;   // replicates `claim` at cost E_Q[claim]
  // Insurance side: equal weights 1/n on the first n clients, total mass 1.
  double mass = 1.0;
};

// Throws ContractError unless verdict.status == RifaExists.
ArbitragePair construct_arbitrage(const Verdict& verdict,
                                  const EvaluationReport& report,
                                  const PricingModel& model);

// premium + (xi . S)_T - claim, per path in index order.
std::vector<double> hedge_surplus(const ArbitragePair& pair,
                                  const PricingModel& model);

struct PortfolioSample {
  std::size_t trial = 0;
  std::size_t path = 0;
  double conditional_value = 0.0;  // G(path, theta)
  std::vector<double> v_terminal;  // premium - mean benefit, per schedule n
  std::vector<double> benefit_sd;  // sample sd of the benefits, per n
  // Clients with tau1 > T and tau2 > T among the first n_max.
  std::size_t survivors = 0;
  // (tau1, tau2) per client; only filled when requested. T + 1 stands for
  // "after maturity".
  std::vector<std::pair<int, int>> clients;
};

struct SimulationOptions {
  double premium = 0.0;
  std::vector<std::size_t> n_schedule;  // strictly increasing, nonempty
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  bool keep_clients = false;
};

// Trial k draws its path from the Q weights and its clients from the
// substream (seed, k).
std::vector<PortfolioSample> simulate_portfolio(const Theta& theta,
                                                const PricingModel& model,
                                                const SimulationOptions& opts);

// Smallest t in 1..T with cdf[t] >= u, or T + 1 when there is none.
int first_passage(std::span<const double> cdf, double u);

struct ThetaCheck {
  Theta theta;
  double mean_outcome = 0.0;
  double min_slack = 0.0;  // min over trials of outcome + budget
  std::size_t violations = 0;
};

struct VerificationReport {
  std::size_t clients = 0;
  std::size_t trials = 0;
  std::vector<ThetaCheck> checks;
  bool passed = false;
};

class VerificationFailure : public std::runtime_error {
 public:
  VerificationFailure(const std::string& what, VerificationReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const VerificationReport& report() const noexcept { return report_; }

 private:
  VerificationReport report_;
};

// Simulates (xi . S)_T + V_T(psi^n) under each theta and requires it to be
// >= -5 sd / sqrt(n) in every trial, with a strictly positive mean for at
// least one theta unless the premium sits on the boundary. Throws
// VerificationFailure otherwise.
VerificationReport verify_arbitrage(const ArbitragePair& pair,
                                    const PricingModel& model,
                                    std::span<const Theta> thetas,
                                    std::size_t clients, std::size_t trials,
                                    std::uint64_t seed);

}  // namespace rifa
