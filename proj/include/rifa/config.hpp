#pragma once

// Run configuration as a JSON document with the top-level keys market,
// benefit, theta_box, copula, optimizer, premium and seed.

#include <cstdint>
#include <optional>
#include <string>

#include "rifa/robust_eval.hpp"

namespace rifa {

struct RunConfig {
  MarketParams market;
  BenefitSpec benefit;
  ParamBox theta_box;
  CopulaSpec copula;
  OptimizerConfig optimizer;
  std::optional<double> premium;
  std::optional<std::uint64_t> seed;

  // Throws ConfigError.
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parses and validates. Throws ConfigError on malformed documents, unknown
// keys, wrong types or invalid values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Pretty-printed JSON that parse_config maps back to an equal RunConfig.
std::string dump_config(const RunConfig& config);

}  // namespace rifa
