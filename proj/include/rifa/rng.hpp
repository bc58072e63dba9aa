#pragma once

#include <cstdint>
#include <random>

namespace rifa {

// 64-bit Mersenne Twister with a portable uniform mapping (the standard
// distributions are implementation-defined, which would break cross-platform
// reproducibility of Monte Carlo output).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent substream for (seed, stream), e.g. one per trial.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x52494641u};
    Rng rng(0);
    rng.engine_.seed(seq);
    return rng;
  }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rifa
