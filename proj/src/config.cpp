#include "rifa/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "rifa/errors.hpp"

namespace rifa {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& where,
               std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* name : allowed) known = known || key == name;
    if (!known) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

double number(const json& obj, const std::string& where, const char* key,
              double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError(where + "." + key + ": expected a number");
  }
  return v.get<double>();
}

long long integer(const json& obj, const std::string& where, const char* key,
                  long long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  // 1e4-style literals arrive as floats; accept them when integral.
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15) {
      return static_cast<long long>(d);
    }
  }
  throw ConfigError(where + "." + key + ": expected an integer");
}

Interval interval(const json& obj, const char* key) {
  const std::string where = std::string("theta_box.") + key;
  if (!obj.contains(key)) {
    throw ConfigError(where + ": missing");
  }
  const auto& v = obj.at(key);
  if (v.is_number()) {
    const double x = v.get<double>();
    return {x, x};
  }
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    throw ConfigError(where + ": expected [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

MarketParams parse_market(const json& j) {
  only_keys(j, "market", {"s0", "u", "v", "r", "T"});
  MarketParams m;
  m.s0 = number(j, "market", "s0", m.s0);
  m.u = number(j, "market", "u", m.u);
  m.v = number(j, "market", "v", m.v);
  m.r = number(j, "market", "r", m.r);
  const long long T = integer(j, "market", "T", m.T);
  if (T < 1 || T > kMaxHorizon) {
    throw ConfigError("market.T: must lie in [1, " +
                      std::to_string(kMaxHorizon) + "]");
  }
  m.T = static_cast<int>(T);
  return m;
}

BenefitSpec parse_benefit(const json& j) {
  only_keys(j, "benefit", {"K", "r_G", "l", "surrender"});
  BenefitSpec b;
  b.K = number(j, "benefit", "K", b.K);
  b.r_G = number(j, "benefit", "r_G", b.r_G);
  b.l = number(j, "benefit", "l", b.l);
  if (j.contains("surrender")) {
    if (!j.at("surrender").is_boolean()) {
      throw ConfigError("benefit.surrender: expected true or false");
    }
    b.surrender_enabled = j.at("surrender").get<bool>();
  }
  return b;
}

ParamBox parse_box(const json& j) {
  only_keys(j, "theta_box", {"a", "b", "c", "d"});
  return {interval(j, "a"), interval(j, "b"), interval(j, "c"),
          interval(j, "d")};
}

CopulaSpec parse_copula(const json& j) {
  only_keys(j, "copula", {"family", "param"});
  CopulaSpec c;
  if (j.contains("family")) {
    if (!j.at("family").is_string()) {
      throw ConfigError("copula.family: expected a string");
    }
    c.family = parse_copula_family(j.at("family").get<std::string>());
  }
  c.param = number(j, "copula", "param", c.param);
  return c;
}

int bounded_int(const json& j, const char* key, int fallback) {
  const long long v = integer(j, "optimizer", key, fallback);
  if (v < 0 || v > 1'000'000'000) {
    throw ConfigError(std::string("optimizer.") + key + ": out of range");
  }
  return static_cast<int>(v);
}

OptimizerConfig parse_optimizer(const json& j) {
  only_keys(j, "optimizer",
            {"method", "multistarts", "tolerance", "max_iters", "grid_points"});
  OptimizerConfig o;
  if (j.contains("method")) {
    if (!j.at("method").is_string()) {
      throw ConfigError("optimizer.method: expected a string");
    }
    o.method = parse_optimizer_method(j.at("method").get<std::string>());
  }
  o.multistarts = bounded_int(j, "multistarts", o.multistarts);
  o.tolerance = number(j, "optimizer", "tolerance", o.tolerance);
  o.max_iters = bounded_int(j, "max_iters", o.max_iters);
  o.grid_points_per_dim = bounded_int(j, "grid_points", o.grid_points_per_dim);
  return o;
}

json interval_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

}  // namespace

void RunConfig::validate() const {
  market.validate();
  benefit.validate();
  theta_box.validate();
  copula.validate();
  optimizer.validate();
  if (premium && !(*premium >= 0.0 && std::isfinite(*premium))) {
    throw ConfigError("premium: must be a nonnegative number");
  }
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  only_keys(j, "config", {"market", "benefit", "theta_box", "copula",
                          "optimizer", "premium", "seed"});
  if (!j.contains("theta_box")) {
    throw ConfigError("config: theta_box is required");
  }
  RunConfig cfg;
  if (j.contains("market")) cfg.market = parse_market(j.at("market"));
  if (j.contains("benefit")) cfg.benefit = parse_benefit(j.at("benefit"));
  cfg.theta_box = parse_box(j.at("theta_box"));
  if (j.contains("copula")) cfg.copula = parse_copula(j.at("copula"));
  if (j.contains("optimizer")) {
    cfg.optimizer = parse_optimizer(j.at("optimizer"));
  }
  if (j.contains("premium") && !j.at("premium").is_null()) {
    cfg.premium = number(j, "config", "premium", 0.0);
  }
  if (j.contains("seed") && !j.at("seed").is_null()) {
    const long long seed = integer(j, "config", "seed", 0);
    if (seed < 0) throw ConfigError("seed: must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("config: cannot read '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const RunConfig& config) {
  json j;
  j["market"] = {{"s0", config.market.s0},
                 {"u", config.market.u},
                 {"v", config.market.v},
                 {"r", config.market.r},
                 {"T", config.market.T}};
  j["benefit"] = {{"K", config.benefit.K},
                  {"r_G", config.benefit.r_G},
                  {"l", config.benefit.l},
                  {"surrender", config.benefit.surrender_enabled}};
  j["theta_box"] = {{"a", interval_json(config.theta_box.a)},
                    {"b", interval_json(config.theta_box.b)},
                    {"c", interval_json(config.theta_box.c)},
                    {"d", interval_json(config.theta_box.d)}};
  j["copula"] = {{"family", std::string(to_string(config.copula.family))},
                 {"param", config.copula.param}};
  j["optimizer"] = {
      {"method", std::string(to_string(config.optimizer.method))},
      {"multistarts", config.optimizer.multistarts},
      {"tolerance", config.optimizer.tolerance},
      {"max_iters", config.optimizer.max_iters},
      {"grid_points", config.optimizer.grid_points_per_dim}};
  if (config.premium) j["premium"] = *config.premium;
  if (config.seed) j["seed"] = *config.seed;
  return j.dump(2) + "\n";
}

}  // namespace rifa
