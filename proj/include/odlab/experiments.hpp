#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "odlab/config.hpp"
#include "odlab/ledger.hpp"
#include "odlab/step.hpp"

namespace odlab {

enum class ExperimentKind { Scaling, Plurality, LowerBound, NormGrowth, WeakVanish, BiasAmplification };

std::string experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

enum class InitKind { Balanced, PlantedBias, SingletonPerVertex, Explicit };

std::string init_name(InitKind kind);
InitKind parse_init(const std::string& name);

struct InitSpec {
    InitKind kind = InitKind::Balanced;
    double bias = 0.0;                        // PlantedBias only
    std::vector<std::int64_t> counts;         // Explicit only
};

/// Free constants the asymptotic statements leave unspecified; the defaults
/// are deliberately generous so the experiments assert the qualitative form,
/// not any particular constant.
struct ExperimentConstants {
    double plurality_bias_factor = 4.0;   // margin factor * sqrt(log n / n)
    double lower_bound_divisor = 20.0;    // success: consensus_time >= k / divisor
    double norm_growth_cstar = 1.0;       // x_gamma = cstar * log(n)/sqrt(n) (2-Choices: cstar * log(n)^2/n)
    double norm_growth_horizon = 50.0;    // horizon = 50 * sqrt(n) log(n)^2 (2-Choices: 50 * n log(n)^3)
    double vanish_window = 20.0;          // success: vanish within 20 log(n)/gamma0
    double bias_amp_window = 50.0;        // success: first event within 50 log(n)/gamma0
    double bias_amp_cstar = 1.0;          // x_delta = x_eta = cstar * sqrt(log n / n)
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Scaling;
    ProtocolKind protocol = ProtocolKind::Sync3Majority;
    std::vector<std::int64_t> n_values;
    std::vector<std::int64_t> k_values;
    InitSpec init;
    std::int64_t trials = 1;
    std::int64_t max_rounds = 0;  // 0: kind-specific default horizon
    ThresholdConfig thresholds;
    std::optional<std::pair<int, int>> tracked_pair;
    std::uint64_t seed = 42;
    ExperimentConstants constants;
    bool use_naive_stepper = false;  // cross-validation cells
    int threads = 0;                 // 0: OpenMP default

    void validate() const;
};

struct TrialResult {
    std::int64_t n = 0;
    std::int64_t k = 0;
    std::int64_t trial = 0;
    std::optional<std::int64_t> consensus_time;
    std::optional<int> winner;
    std::int64_t rounds_executed = 0;
    HitTime tau_plus_gamma;
    HitTime tau_weak;
    HitTime tau_vanish;
    HitTime tau_plus_delta;
    HitTime tau_plus_eta;
    HitTime first_event;  // BiasAmplification: min of the tracked events
    bool success = false;
    double wall_seconds = 0.0;  // never serialized
};

struct CellSummary {
    std::int64_t n = 0;
    std::int64_t k = 0;
    double median = 0.0;  // +inf when over half the trials miss
    double q10 = 0.0;
    double q90 = 0.0;
    double success_rate = 0.0;
    std::int64_t timeouts = 0;
};

struct ExperimentResult {
    ExperimentSpec spec;  // resolved spec, echoed to output
    std::vector<TrialResult> trials;
    std::vector<CellSummary> cells;
};

/// Runs trials x |n_values| x |k_values| independent runs; trials are
/// distributed over OpenMP threads with per-trial streams keyed by
/// (seed, n, k, trial), so results are byte-stable under any thread count.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least-squares line through (log k, log median). Throws DegenerateInput
/// with fewer than 3 distinct positive points.
LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

// Kind-specific derived quantities, shared by the engine and the tests.
double norm_growth_threshold(ProtocolKind protocol, std::int64_t n, double cstar);
std::int64_t norm_growth_horizon(ProtocolKind protocol, std::int64_t n, double scale);
Configuration build_init(const InitSpec& init, std::int64_t n, std::int64_t k);

}  // namespace odlab
