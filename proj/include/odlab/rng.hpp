#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace odlab {

/// Deterministic random stream ("odlab-rng v1"): a std::mt19937_64 engine
/// seeded from a splitmix64 hash of (seed, key parts, purpose tag).
/// Streams derived from distinct keys are independent by construction, so
/// deleting one experiment cell never perturbs another.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    static std::uint64_t mix(std::uint64_t z);

    static RandomStream derive(std::uint64_t seed,
                               std::uint64_t a,
                               std::uint64_t b,
                               std::uint64_t c,
                               std::string_view purpose);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, bound). bound >= 1.
    std::int64_t uniform_below(std::int64_t bound);

    /// Uniform in [0, 1).
    double uniform01();

    /// Exact binomial draw (inversion / rejection, never a normal
    /// approximation).
    std::int64_t binomial(std::int64_t trials, double p);

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace odlab
