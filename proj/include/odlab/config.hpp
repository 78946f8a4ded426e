#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace odlab {

enum class ProtocolKind { Sync3Majority, Sync2Choices, Async3Majority };

bool is_synchronous(ProtocolKind protocol);

// Short names used on the command line and in CSV output.
std::string protocol_name(ProtocolKind protocol);
ProtocolKind parse_protocol(const std::string& name);

/// Full state of the chain: per-opinion vertex counts at one round.
/// Opinion identity is positional; zero-count opinions keep their index.
struct Configuration {
    std::int64_t n = 0;
    std::vector<std::int64_t> counts;

    int k() const { return static_cast<int>(counts.size()); }

    /// Throws SpecError unless n >= 1, k >= 1, all counts >= 0 and sum to n.
    void validate() const;

    bool is_consensus() const;
    std::optional<int> winner() const;  // set iff some counts[i] == n
};

// Initial configurations used by the experiment harness.
Configuration balanced_config(std::int64_t n, int k);
Configuration singleton_config(std::int64_t n);  // k == n, one vertex each
Configuration explicit_config(std::int64_t n, std::vector<std::int64_t> counts);

// Plurality setup: opinion 0 gets fraction 1/k + bias*(k-1)/k (rounded up),
// every other opinion gets an equal share of the rest, the last opinion
// absorbs the integer rounding slack.
Configuration planted_bias_config(std::int64_t n, int k, double bias);

// Smallest vertex-count gap (as a fraction) meeting the plurality hypothesis
// margin factor * sqrt(log(n)/n); for Sync2Choices the margin scales with
// sqrt(alpha_1) and is resolved by fixed-point iteration.
double plurality_bias(ProtocolKind protocol, std::int64_t n, int k, double factor);

}  // namespace odlab
