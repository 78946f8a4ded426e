#include "odlab/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>

#include "odlab/errors.hpp"
#include "odlab/kernel.hpp"
#include "odlab/ledger.hpp"

namespace odlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_n(std::int64_t n) {
    return std::log(static_cast<double>(n));
}

std::int64_t ceil_to_rounds(double value) {
    return static_cast<std::int64_t>(std::ceil(std::max(value, 1.0)));
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Scaling: return "scaling";
        case ExperimentKind::Plurality: return "plurality";
        case ExperimentKind::LowerBound: return "lowerbound";
        case ExperimentKind::NormGrowth: return "normgrowth";
        case ExperimentKind::WeakVanish: return "weakvanish";
        case ExperimentKind::BiasAmplification: return "biasamp";
    }
    return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
    for (ExperimentKind kind : {ExperimentKind::Scaling, ExperimentKind::Plurality, ExperimentKind::LowerBound,
                                ExperimentKind::NormGrowth, ExperimentKind::WeakVanish, ExperimentKind::BiasAmplification})
        if (experiment_name(kind) == name) return kind;
    throw SpecError("unknown experiment kind '" + name + "'");
}

std::string init_name(InitKind kind) {
    switch (kind) {
        case InitKind::Balanced: return "balanced";
        case InitKind::PlantedBias: return "planted";
        case InitKind::SingletonPerVertex: return "singleton";
        case InitKind::Explicit: return "explicit";
    }
    return "?";
}

InitKind parse_init(const std::string& name) {
    for (InitKind kind : {InitKind::Balanced, InitKind::PlantedBias, InitKind::SingletonPerVertex, InitKind::Explicit})
        if (init_name(kind) == name) return kind;
    throw SpecError("unknown init kind '" + name + "'");
}

Configuration build_init(const InitSpec& init, std::int64_t n, std::int64_t k) {
    switch (init.kind) {
        case InitKind::Balanced:
            return balanced_config(n, static_cast<int>(k));
        case InitKind::PlantedBias:
            return planted_bias_config(n, static_cast<int>(k), init.bias);
        case InitKind::SingletonPerVertex:
            if (k != n) throw SpecError("singleton init requires k == n");
            return singleton_config(n);
        case InitKind::Explicit: {
            if (static_cast<std::int64_t>(init.counts.size()) != k)
                throw SpecError("explicit init: counts length differs from k");
            return explicit_config(n, init.counts);
        }
    }
    throw SpecError("unknown init kind");
}

void ExperimentSpec::validate() const {
    if (trials < 1) throw SpecError("spec: trials must be >= 1");
    if (n_values.empty() || k_values.empty()) throw SpecError("spec: n_values and k_values must be non-empty");
    for (std::int64_t n : n_values) {
        if (n < 1) throw SpecError("spec: n must be >= 1");
        for (std::int64_t k : k_values) {
            if (k < 1) throw SpecError("spec: k must be >= 1");
            if (k > n) throw SpecError("spec: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
        }
    }
    if (max_rounds < 0) throw SpecError("spec: max_rounds must be >= 0");
    thresholds.validate();
    if (kind == ExperimentKind::WeakVanish && init.kind != InitKind::Explicit)
        throw SpecError("weakvanish requires an explicit init with a weak opinion");
}

double norm_growth_threshold(ProtocolKind protocol, std::int64_t n, double cstar) {
    const double ln = log_n(n);
    if (protocol == ProtocolKind::Sync2Choices) return cstar * ln * ln / static_cast<double>(n);
    return cstar * ln / std::sqrt(static_cast<double>(n));
}

std::int64_t norm_growth_horizon(ProtocolKind protocol, std::int64_t n, double scale) {
    const double ln = log_n(n);
    const double nd = static_cast<double>(n);
    double rounds;
    switch (protocol) {
        case ProtocolKind::Sync2Choices: rounds = scale * nd * ln * ln * ln; break;
        case ProtocolKind::Async3Majority: rounds = scale * nd * std::sqrt(nd) * ln * ln; break;
        default: rounds = scale * std::sqrt(nd) * ln * ln; break;
    }
    return ceil_to_rounds(rounds);
}

namespace {

std::int64_t default_horizon(const ExperimentSpec& spec, std::int64_t n, std::int64_t k, double gamma0) {
    const double ln = log_n(n);
    const double nd = static_cast<double>(n);
    switch (spec.kind) {
        case ExperimentKind::LowerBound:
            return std::max<std::int64_t>(k, 1);
        case ExperimentKind::NormGrowth:
            return norm_growth_horizon(spec.protocol, n, spec.constants.norm_growth_horizon);
        case ExperimentKind::WeakVanish:
            return ceil_to_rounds(5.0 * spec.constants.vanish_window * ln / gamma0 + 1000.0);
        case ExperimentKind::BiasAmplification:
            return ceil_to_rounds(2.0 * spec.constants.bias_amp_window * ln / gamma0 + 1000.0);
        default: {
            // generous consensus horizon for scaling/plurality sweeps
            double rounds = 50.0 * (std::min(std::sqrt(nd), static_cast<double>(k)) + 1.0) * ln * ln + 1000.0;
            if (spec.protocol == ProtocolKind::Sync2Choices) rounds = 50.0 * (static_cast<double>(k) + 1.0) * ln * ln + 1000.0;
            if (spec.protocol == ProtocolKind::Async3Majority) rounds *= nd;
            return ceil_to_rounds(rounds);
        }
    }
}

int find_weak_opinion(const Configuration& init, const ThresholdConfig& thresholds) {
    const RoundRecord record = summarize(init, thresholds, 0);
    int weakest = -1;
    for (int i = 0; i < init.k(); ++i) {
        if (!record.weak[i]) continue;
        if (weakest < 0 || record.alpha[i] < record.alpha[weakest]) weakest = i;
    }
    if (weakest < 0) throw SpecError("weakvanish: no opinion is weak at round 0");
    return weakest;
}

TrialResult run_scaling_like(const ExperimentSpec& spec,
                             const Configuration& init,
                             std::int64_t max_rounds,
                             RandomStream& rng) {
    const StepperKind stepper = spec.use_naive_stepper ? StepperKind::Naive : StepperKind::Fast;
    const RunResult r = run(spec.protocol, init, max_rounds, rng, {}, stepper);
    TrialResult out;
    out.consensus_time = r.consensus_time;
    out.winner = r.winner;
    out.rounds_executed = r.rounds_executed;
    return out;
}

TrialResult run_norm_growth_trial(const ExperimentSpec& spec,
                                  const Configuration& init,
                                  std::int64_t max_rounds,
                                  RandomStream& rng) {
    const StepperKind stepper = spec.use_naive_stepper ? StepperKind::Naive : StepperKind::Fast;
    const double threshold = norm_growth_threshold(spec.protocol, init.n, spec.constants.norm_growth_cstar);

    TrialResult out;
    if (squared_norm(init) >= threshold) {
        out.tau_plus_gamma = 0;
        out.success = true;
        return out;
    }
    HitTime hit;
    const RoundObserver observer = [&](std::int64_t t, const Configuration& config) {
        if (!hit && squared_norm(config) >= threshold) hit = t;
        return !hit.has_value();
    };
    const RunResult r = run(spec.protocol, init, max_rounds, rng, observer, stepper);
    out.consensus_time = r.consensus_time;
    out.winner = r.winner;
    out.rounds_executed = r.rounds_executed;
    out.tau_plus_gamma = hit;
    out.success = hit.has_value();
    return out;
}

TrialResult run_weak_vanish_trial(const ExperimentSpec& spec,
                                  const Configuration& init,
                                  std::int64_t max_rounds,
                                  RandomStream& rng,
                                  int weak_opinion,
                                  std::int64_t window) {
    const StepperKind stepper = spec.use_naive_stepper ? StepperKind::Naive : StepperKind::Fast;
    StoppingLedger ledger(init, spec.thresholds);
    ledger.update(summarize(init, spec.thresholds, 0), spec.thresholds);
    const RoundObserver observer = [&](std::int64_t t, const Configuration& config) {
        ledger.update(summarize(config, spec.thresholds, t), spec.thresholds);
        return true;  // run on to consensus so the winner is known
    };
    const RunResult r = run(spec.protocol, init, max_rounds, rng, observer, stepper);

    TrialResult out;
    out.consensus_time = r.consensus_time;
    out.winner = r.winner;
    out.rounds_executed = r.rounds_executed;
    out.tau_weak = ledger.tau_weak(weak_opinion);
    out.tau_vanish = ledger.tau_vanish(weak_opinion);
    out.tau_plus_gamma = ledger.tau_plus_gamma();
    out.success = out.tau_vanish.has_value() && *out.tau_vanish <= window;
    return out;
}

TrialResult run_bias_amplification_trial(const ExperimentSpec& spec,
                                         const Configuration& init,
                                         std::int64_t max_rounds,
                                         RandomStream& rng,
                                         std::pair<int, int> pair,
                                         const ThresholdConfig& thresholds,
                                         std::int64_t window) {
    const StepperKind stepper = spec.use_naive_stepper ? StepperKind::Naive : StepperKind::Fast;
    const bool use_eta = spec.protocol == ProtocolKind::Sync2Choices;

    StoppingLedger ledger(init, thresholds, pair);
    const auto fired = [&]() -> HitTime {
        HitTime first;
        for (const HitTime& hit : {use_eta ? ledger.tau_plus_eta() : ledger.tau_plus_delta(),
                                   ledger.tau_weak(pair.first), ledger.tau_weak(pair.second)})
            if (hit && (!first || *hit < *first)) first = hit;
        return first;
    };
    ledger.update(summarize(init, thresholds, 0, pair), thresholds);
    const RoundObserver observer = [&](std::int64_t t, const Configuration& config) {
        ledger.update(summarize(config, thresholds, t, pair), thresholds);
        return !fired().has_value();
    };
    TrialResult out;
    if (!fired()) {
        const RunResult r = run(spec.protocol, init, max_rounds, rng, observer, stepper);
        out.consensus_time = r.consensus_time;
        out.winner = r.winner;
        out.rounds_executed = r.rounds_executed;
    }
    out.tau_plus_delta = ledger.tau_plus_delta();
    out.tau_plus_eta = ledger.tau_plus_eta();
    const HitTime weak_i = ledger.tau_weak(pair.first);
    const HitTime weak_j = ledger.tau_weak(pair.second);
    out.tau_weak = weak_i && weak_j ? std::min(*weak_i, *weak_j) : (weak_i ? weak_i : weak_j);
    out.first_event = fired();
    out.success = out.first_event.has_value() && *out.first_event <= window;
    return out;
}

double trial_metric(const ExperimentSpec& spec, const TrialResult& result) {
    const auto as_double = [](const HitTime& hit) { return hit ? static_cast<double>(*hit) : kInf; };
    switch (spec.kind) {
        case ExperimentKind::NormGrowth: return as_double(result.tau_plus_gamma);
        case ExperimentKind::WeakVanish: return as_double(result.tau_vanish);
        case ExperimentKind::BiasAmplification: return as_double(result.first_event);
        default: return result.consensus_time ? static_cast<double>(*result.consensus_time) : kInf;
    }
}

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const std::size_t idx = std::min(values.size() - 1, static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size()))));
    return values[idx];
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();

    struct Cell {
        std::int64_t n, k;
        Configuration init;
        double gamma0;
        std::int64_t max_rounds;
        std::int64_t window = 0;   // success horizon (rounds)
        int weak_opinion = -1;     // WeakVanish
        std::pair<int, int> pair{0, 1};
        ThresholdConfig thresholds;
    };

    std::vector<Cell> cells;
    for (std::int64_t n : spec.n_values) {
        for (std::int64_t k : spec.k_values) {
            Cell cell;
            cell.n = n;
            cell.k = k;
            cell.init = build_init(spec.init, n, k);
            cell.gamma0 = squared_norm(cell.init);
            cell.thresholds = spec.thresholds;
            const double ln = log_n(n);
            switch (spec.kind) {
                case ExperimentKind::WeakVanish:
                    cell.weak_opinion = find_weak_opinion(cell.init, spec.thresholds);
                    cell.window = ceil_to_rounds(spec.constants.vanish_window * ln / cell.gamma0);
                    break;
                case ExperimentKind::BiasAmplification: {
                    cell.pair = spec.tracked_pair.value_or(std::make_pair(0, 1));
                    const double x = spec.constants.bias_amp_cstar * std::sqrt(ln / static_cast<double>(n));
                    cell.thresholds.x_delta = x;
                    cell.thresholds.x_eta = x;
                    cell.window = ceil_to_rounds(spec.constants.bias_amp_window * ln / cell.gamma0);
                    break;
                }
                case ExperimentKind::NormGrowth:
                    cell.window = norm_growth_horizon(spec.protocol, n, spec.constants.norm_growth_horizon);
                    break;
                default:
                    break;
            }
            cell.max_rounds = spec.max_rounds > 0 ? spec.max_rounds : default_horizon(spec, n, k, cell.gamma0);
            if (spec.kind == ExperimentKind::NormGrowth) cell.max_rounds = std::min(cell.max_rounds, cell.window);
            cells.push_back(std::move(cell));
        }
    }

    ExperimentResult result;
    result.spec = spec;
    result.trials.assign(cells.size() * spec.trials, TrialResult{});

    if (spec.threads > 0) omp_set_num_threads(spec.threads);

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::atomic<bool> failed{false};
    const std::int64_t total = static_cast<std::int64_t>(cells.size()) * spec.trials;

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t job = 0; job < total; ++job) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            const Cell& cell = cells[job / spec.trials];
            const std::int64_t trial = job % spec.trials;
            RandomStream rng = RandomStream::derive(spec.seed, static_cast<std::uint64_t>(cell.n),
                                                    static_cast<std::uint64_t>(cell.k),
                                                    static_cast<std::uint64_t>(trial), "trial");
            const auto start = std::chrono::steady_clock::now();
            TrialResult trial_result;
            switch (spec.kind) {
                case ExperimentKind::NormGrowth:
                    trial_result = run_norm_growth_trial(spec, cell.init, cell.max_rounds, rng);
                    break;
                case ExperimentKind::WeakVanish:
                    trial_result = run_weak_vanish_trial(spec, cell.init, cell.max_rounds, rng, cell.weak_opinion, cell.window);
                    break;
                case ExperimentKind::BiasAmplification:
                    trial_result = run_bias_amplification_trial(spec, cell.init, cell.max_rounds, rng, cell.pair,
                                                                cell.thresholds, cell.window);
                    break;
                default:
                    trial_result = run_scaling_like(spec, cell.init, cell.max_rounds, rng);
                    break;
            }
            trial_result.n = cell.n;
            trial_result.k = cell.k;
            trial_result.trial = trial;
            switch (spec.kind) {
                case ExperimentKind::Scaling:
                    trial_result.success = trial_result.consensus_time.has_value();
                    break;
                case ExperimentKind::Plurality:
                    trial_result.success = trial_result.winner.has_value() && *trial_result.winner == 0;
                    break;
                case ExperimentKind::LowerBound:
                    trial_result.success = !trial_result.consensus_time.has_value() ||
                                           static_cast<double>(*trial_result.consensus_time) >=
                                               static_cast<double>(cell.k) / spec.constants.lower_bound_divisor;
                    break;
                default:
                    break;  // set by the kind-specific runner
            }
            trial_result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            result.trials[job] = std::move(trial_result);
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
        }
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t c = 0; c < cells.size(); ++c) {
        CellSummary summary;
        summary.n = cells[c].n;
        summary.k = cells[c].k;
        std::vector<double> metric(spec.trials);
        std::int64_t successes = 0;
        for (std::int64_t t = 0; t < spec.trials; ++t) {
            const TrialResult& trial_result = result.trials[c * spec.trials + t];
            metric[t] = trial_metric(spec, trial_result);
            if (std::isinf(metric[t])) summary.timeouts += 1;
            if (trial_result.success) successes += 1;
        }
        summary.median = quantile(metric, 0.5);
        summary.q10 = quantile(metric, 0.1);
        summary.q90 = quantile(metric, 0.9);
        summary.success_rate = static_cast<double>(successes) / static_cast<double>(spec.trials);
        result.cells.push_back(summary);
    }
    return result;
}

LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    std::vector<double> xs;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0) || std::isinf(y)) throw DegenerateInput("fit_loglog_slope: points must be finite and positive");
        if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    }
    if (xs.size() < 3) throw DegenerateInput("fit_loglog_slope: need at least 3 distinct abscissae");

    const double m = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : points) {
        sx += std::log(x);
        sy += std::log(y);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        const double dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        const double r = std::log(y) - (fit.intercept + fit.slope * std::log(x));
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

}  // namespace odlab
