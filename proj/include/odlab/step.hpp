#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "odlab/config.hpp"
#include "odlab/rng.hpp"

namespace odlab {

enum class StepperKind { Fast, Naive };

struct RunResult {
    std::optional<std::int64_t> consensus_time;  // empty means timeout
    std::optional<int> winner;
    std::int64_t rounds_executed = 0;
    Configuration final_config;

    bool timed_out() const { return !consensus_time.has_value(); }
};

/// Reference stepper: simulates each of the n vertices independently.
/// O(n log k) per round. Synchronous protocols only.
Configuration step_naive(const Configuration& config, ProtocolKind protocol, RandomStream& rng);

/// Distribution-exact stepper; equals step_naive in law.
/// Sync3Majority draws the new counts as one multinomial (sequential
/// conditional binomials); Sync2Choices draws per-origin switcher counts and
/// splits them over destinations. O(k) resp. O(k^2) per round.
Configuration step_fast(const Configuration& config, ProtocolKind protocol, RandomStream& rng);

/// One activation of asynchronous 3-Majority: a uniformly random vertex
/// redraws its opinion; at most one count moves by one.
Configuration step_async(const Configuration& config, RandomStream& rng);

/// Per-round hook invoked with the new configuration; return false to stop
/// the run early (the result then reports no consensus unless the final
/// round reached it).
using RoundObserver = std::function<bool(std::int64_t t, const Configuration&)>;

/// Iterates the stepper for `protocol` until consensus or max_rounds.
/// One stepper call is one round; for Async3Majority a round is a single
/// activation (callers convert to parallel rounds if they need to).
RunResult run(ProtocolKind protocol,
              const Configuration& init,
              std::int64_t max_rounds,
              RandomStream& rng,
              const RoundObserver& observer = {},
              StepperKind stepper = StepperKind::Fast);

}  // namespace odlab
