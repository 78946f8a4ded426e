#include "odlab/step.hpp"

#include <algorithm>

#include "odlab/errors.hpp"
#include "odlab/kernel.hpp"

namespace odlab {

namespace {

std::vector<std::int64_t> cumulative_counts(const Configuration& config) {
    std::vector<std::int64_t> cum(config.counts.size());
    std::int64_t running = 0;
    for (std::size_t i = 0; i < cum.size(); ++i) {
        running += config.counts[i];
        cum[i] = running;
    }
    return cum;
}

// Opinion of a uniformly random vertex.
int draw_opinion(const std::vector<std::int64_t>& cum, std::int64_t n, RandomStream& rng) {
    const std::int64_t u = rng.uniform_below(n);
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    return static_cast<int>(it - cum.begin());
}

void require_synchronous(ProtocolKind protocol) {
    if (!is_synchronous(protocol)) throw SpecError("synchronous stepper invoked with the asynchronous protocol");
}

}  // namespace

Configuration step_naive(const Configuration& config, ProtocolKind protocol, RandomStream& rng) {
    require_synchronous(protocol);
    config.validate();
    const auto cum = cumulative_counts(config);

    Configuration next;
    next.n = config.n;
    next.counts.assign(config.counts.size(), 0);

    if (protocol == ProtocolKind::Sync3Majority) {
        for (std::int64_t v = 0; v < config.n; ++v) {
            const int w1 = draw_opinion(cum, config.n, rng);
            const int w2 = draw_opinion(cum, config.n, rng);
            const int w3 = draw_opinion(cum, config.n, rng);
            next.counts[w1 == w2 ? w1 : w3] += 1;
        }
    } else {
        for (int j = 0; j < config.k(); ++j) {
            for (std::int64_t v = 0; v < config.counts[j]; ++v) {
                const int w1 = draw_opinion(cum, config.n, rng);
                const int w2 = draw_opinion(cum, config.n, rng);
                next.counts[w1 == w2 ? w1 : j] += 1;
            }
        }
    }
    return next;
}

Configuration step_fast(const Configuration& config, ProtocolKind protocol, RandomStream& rng) {
    require_synchronous(protocol);
    config.validate();

    Configuration next;
    next.n = config.n;
    next.counts.assign(config.counts.size(), 0);

    std::vector<int> occupied;
    occupied.reserve(config.counts.size());
    for (int i = 0; i < config.k(); ++i)
        if (config.counts[i] > 0) occupied.push_back(i);

    if (protocol == ProtocolKind::Sync3Majority) {
        // One multinomial draw over the destination law, realized as
        // sequential conditional binomials. Empty opinions have destination
        // probability exactly 0 and are never assigned.
        const StepKernel kernel = kernel_3majority(config);
        std::int64_t remaining = config.n;
        double mass_left = 1.0;
        for (std::size_t idx = 0; idx < occupied.size() && remaining > 0; ++idx) {
            const int i = occupied[idx];
            if (idx + 1 == occupied.size()) {
                next.counts[i] = remaining;
                remaining = 0;
                break;
            }
            const double p = std::clamp(kernel.dest[i] / mass_left, 0.0, 1.0);
            const std::int64_t draw = rng.binomial(remaining, p);
            next.counts[i] = draw;
            remaining -= draw;
            mass_left -= kernel.dest[i];
        }
        return next;
    }

    // 2-Choices: per origin, draw how many holders switch away, then split
    // the switchers over the other opinions proportionally to their squared
    // fractions. The split is a multinomial; it is realized either as
    // sequential conditional binomials (dense) or as per-switcher
    // categorical draws with rejection of the origin (sparse), both exact.
    const StepKernel kernel = kernel_2choices(config);
    std::vector<double> cum_sq;
    cum_sq.reserve(occupied.size());
    double total_sq = 0.0;
    for (const int i : occupied) {
        total_sq += kernel.dest_sq[i];
        cum_sq.push_back(total_sq);
    }

    for (const int j : occupied) {
        const std::int64_t holders = config.counts[j];
        const double switch_mass = kernel.gamma - kernel.dest_sq[j];
        if (switch_mass < -1e-12)
            throw DegenerateSwitchMass("2-Choices switch mass " + std::to_string(switch_mass) + " for opinion " + std::to_string(j));
        std::int64_t switchers = 0;
        if (switch_mass > 0.0 && occupied.size() > 1)
            switchers = rng.binomial(holders, std::clamp(switch_mass, 0.0, 1.0));
        next.counts[j] += holders - switchers;
        if (switchers == 0) continue;

        const bool sparse = switchers * 8 < static_cast<std::int64_t>(occupied.size()) &&
                            kernel.dest_sq[j] * 2.0 <= total_sq;
        if (sparse) {
            for (std::int64_t s = 0; s < switchers; ++s) {
                int target = j;
                while (target == j) {
                    const double u = rng.uniform01() * total_sq;
                    const auto it = std::upper_bound(cum_sq.begin(), cum_sq.end(), u);
                    const std::size_t idx = std::min(static_cast<std::size_t>(it - cum_sq.begin()), occupied.size() - 1);
                    target = occupied[idx];
                }
                next.counts[target] += 1;
            }
            continue;
        }

        double mass_left = switch_mass;
        std::int64_t remaining = switchers;
        int last_target = -1;
        for (const int i : occupied)
            if (i != j) last_target = i;
        for (const int i : occupied) {
            if (i == j || remaining == 0) continue;
            if (i == last_target) {
                next.counts[i] += remaining;
                remaining = 0;
                break;
            }
            const double p = std::clamp(kernel.dest_sq[i] / mass_left, 0.0, 1.0);
            const std::int64_t draw = rng.binomial(remaining, p);
            next.counts[i] += draw;
            remaining -= draw;
            mass_left -= kernel.dest_sq[i];
        }
    }
    return next;
}

Configuration step_async(const Configuration& config, RandomStream& rng) {
    config.validate();
    const auto cum = cumulative_counts(config);

    const int updater = draw_opinion(cum, config.n, rng);
    const int w1 = draw_opinion(cum, config.n, rng);
    const int w2 = draw_opinion(cum, config.n, rng);
    const int w3 = draw_opinion(cum, config.n, rng);
    const int dest = (w1 == w2) ? w1 : w3;

    Configuration next = config;
    next.counts[updater] -= 1;
    next.counts[dest] += 1;
    return next;
}

RunResult run(ProtocolKind protocol,
              const Configuration& init,
              std::int64_t max_rounds,
              RandomStream& rng,
              const RoundObserver& observer,
              StepperKind stepper) {
    if (max_rounds < 0) throw SpecError("run: max_rounds must be >= 0");
    init.validate();

    RunResult result;
    result.final_config = init;
    if (init.is_consensus()) {
        result.consensus_time = 0;
        result.winner = init.winner();
        return result;
    }

    Configuration current = init;
    for (std::int64_t t = 1; t <= max_rounds; ++t) {
        switch (protocol) {
            case ProtocolKind::Sync3Majority:
            case ProtocolKind::Sync2Choices:
                current = stepper == StepperKind::Fast ? step_fast(current, protocol, rng)
                                                       : step_naive(current, protocol, rng);
                break;
            case ProtocolKind::Async3Majority:
                current = step_async(current, rng);
                break;
        }
        result.rounds_executed = t;
        const bool keep_going = observer ? observer(t, current) : true;
        if (current.is_consensus()) {
            result.consensus_time = t;
            result.winner = current.winner();
            break;
        }
        if (!keep_going) break;
    }
    result.final_config = std::move(current);
    return result;
}

}  // namespace odlab
