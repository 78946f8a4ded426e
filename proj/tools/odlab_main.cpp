// odlab: simulation laboratory for multi-opinion consensus dynamics on the
// complete graph (synchronous 3-Majority / 2-Choices, asynchronous
// 3-Majority). All randomness derives from the --seed flag; no invocation
// reads the clock for anything that affects results.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "odlab/bounds.hpp"
#include "odlab/errors.hpp"
#include "odlab/experiments.hpp"
#include "odlab/io.hpp"
#include "odlab/kernel.hpp"
#include "odlab/ledger.hpp"
#include "odlab/verify.hpp"

namespace {

using namespace odlab;
using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 42;

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("OD_LAB_THREADS")) {
        try {
            const int parsed = std::stoi(env);
            if (parsed > 0) return parsed;
        } catch (...) {
            throw SpecError("OD_LAB_THREADS is not a positive integer");
        }
    }
    return 0;
}

struct SimulateOptions {
    std::string protocol = "3maj";
    std::int64_t n = 1000;
    std::int64_t k = 2;
    std::string init = "balanced";
    double bias = 0.0;
    std::vector<std::int64_t> counts;
    std::int64_t max_rounds = 0;
    std::uint64_t seed = kDefaultSeed;
    std::string out_dir = "odlab-out";
    std::vector<int> tracked;
    bool naive = false;
};

int run_simulate(const SimulateOptions& options) {
    const ProtocolKind protocol = parse_protocol(options.protocol);
    InitSpec init;
    init.kind = parse_init(options.init);
    init.bias = options.bias;
    init.counts = options.counts;
    const Configuration start = build_init(init, options.n, init.kind == InitKind::Explicit
                                                               ? static_cast<std::int64_t>(options.counts.size())
                                                               : options.k);

    std::optional<std::pair<int, int>> tracked_pair;
    if (!options.tracked.empty()) {
        if (options.tracked.size() != 2) throw SpecError("--tracked-pair needs exactly two opinion indices");
        tracked_pair = std::make_pair(options.tracked[0], options.tracked[1]);
    }

    ThresholdConfig thresholds;
    std::int64_t max_rounds = options.max_rounds;
    if (max_rounds == 0) {
        const double nd = static_cast<double>(options.n);
        const double ln = std::log(nd);
        max_rounds = static_cast<std::int64_t>(50.0 * (std::sqrt(nd) + start.k()) * ln * ln) + 1000;
        if (protocol == ProtocolKind::Async3Majority) max_rounds *= options.n;
    }

    std::ostringstream trace;
    trace << "t,gamma,max_alpha,remaining,delta,eta,weak_count\n";
    const auto emit = [&](const RoundRecord& record) {
        trace << record.t << ',' << format_double(record.gamma) << ',' << format_double(record.max_alpha) << ','
              << record.remaining_opinions << ',';
        if (record.tracked)
            trace << format_double(record.tracked->delta) << ',' << format_double(record.tracked->eta);
        else
            trace << ',';
        trace << ',' << record.weak_count << '\n';
    };

    StoppingLedger ledger(start, thresholds, tracked_pair);
    emit(summarize(start, thresholds, 0, tracked_pair));
    ledger.update(summarize(start, thresholds, 0, tracked_pair), thresholds);

    RandomStream rng = RandomStream::derive(options.seed, static_cast<std::uint64_t>(options.n),
                                            static_cast<std::uint64_t>(start.k()), 0, "simulate");
    const RoundObserver observer = [&](std::int64_t t, const Configuration& config) {
        const RoundRecord record = summarize(config, thresholds, t, tracked_pair);
        emit(record);
        ledger.update(record, thresholds);
        return true;
    };
    const RunResult result = run(protocol, start, max_rounds, rng, observer,
                                 options.naive ? StepperKind::Naive : StepperKind::Fast);

    json out;
    out["spec_version"] = kSpecVersion;
    out["protocol"] = protocol_name(protocol);
    out["n"] = options.n;
    out["k"] = start.k();
    out["seed"] = options.seed;
    out["max_rounds"] = max_rounds;
    out["consensus_time"] = result.consensus_time ? json(*result.consensus_time) : json(nullptr);
    out["winner"] = result.winner ? json(*result.winner) : json(nullptr);
    out["rounds_executed"] = result.rounds_executed;
    out["final_counts"] = result.final_config.counts;

    const std::filesystem::path dir(options.out_dir);
    atomic_write_file((dir / "trace.csv").string(), trace.str());
    atomic_write_file((dir / "result.json").string(), out.dump(2) + "\n");
    std::cout << out.dump(2) << std::endl;
    return 0;
}

// Shared flags for the sweep-style subcommands.
struct SweepOptions {
    std::string protocol = "3maj";
    std::vector<std::int64_t> n_values;
    std::vector<std::int64_t> k_values;
    std::string init = "balanced";
    double bias = 0.0;
    std::vector<std::int64_t> counts;
    std::int64_t trials = 50;
    std::int64_t max_rounds = 0;
    std::uint64_t seed = kDefaultSeed;
    std::string out_dir = "odlab-out";
    std::string spec_file;
    std::vector<int> tracked;
    bool naive = false;
    int threads = 0;
    // experiment constants
    double bias_factor = 4.0;
    double lower_divisor = 20.0;
    double cstar = 1.0;
    double horizon_scale = 50.0;
    double window = 0.0;  // 0: kind default
};

ExperimentSpec build_spec(ExperimentKind kind, const SweepOptions& options) {
    if (!options.spec_file.empty()) {
        std::ifstream in(options.spec_file);
        if (!in) throw SpecError("cannot read spec file " + options.spec_file);
        std::ostringstream text;
        text << in.rdbuf();
        ExperimentSpec spec = parse_spec_json(text.str());
        spec.threads = resolve_threads(options.threads > 0 ? options.threads : spec.threads);
        return spec;
    }

    ExperimentSpec spec;
    spec.kind = kind;
    spec.protocol = parse_protocol(options.protocol);
    spec.n_values = options.n_values;
    spec.k_values = options.k_values;
    spec.init.kind = parse_init(options.init);
    spec.init.bias = options.bias;
    spec.init.counts = options.counts;
    spec.trials = options.trials;
    spec.max_rounds = options.max_rounds;
    spec.seed = options.seed;
    spec.use_naive_stepper = options.naive;
    spec.threads = resolve_threads(options.threads);
    spec.constants.plurality_bias_factor = options.bias_factor;
    spec.constants.lower_bound_divisor = options.lower_divisor;
    spec.constants.norm_growth_cstar = options.cstar;
    spec.constants.norm_growth_horizon = options.horizon_scale;
    if (options.window > 0.0) {
        spec.constants.vanish_window = options.window;
        spec.constants.bias_amp_window = options.window;
    }
    if (!options.tracked.empty()) {
        if (options.tracked.size() != 2) throw SpecError("--tracked-pair needs exactly two opinion indices");
        spec.tracked_pair = std::make_pair(options.tracked[0], options.tracked[1]);
    }

    // kind-specific resolution
    if (kind == ExperimentKind::Plurality && spec.init.kind == InitKind::PlantedBias && spec.init.bias == 0.0) {
        if (spec.k_values.size() != 1 || spec.n_values.size() != 1)
            throw SpecError("plurality with derived bias needs a single (n, k) cell");
        spec.init.bias = plurality_bias(spec.protocol, spec.n_values[0], static_cast<int>(spec.k_values[0]),
                                        spec.constants.plurality_bias_factor);
    }
    if (kind == ExperimentKind::NormGrowth && spec.init.kind == InitKind::SingletonPerVertex) {
        spec.k_values.clear();
        for (std::int64_t n : spec.n_values) spec.k_values.push_back(n);
        if (spec.n_values.size() != 1) throw SpecError("normgrowth singleton init needs a single n");
    }
    return spec;
}

int run_sweep_command(ExperimentKind kind, const SweepOptions& options) {
    const ExperimentSpec spec = build_spec(kind, options);
    const ExperimentResult result = run_experiment(spec);
    write_experiment_output(result, options.out_dir);

    json echo;
    echo["experiment"] = experiment_name(spec.kind);
    echo["cells"] = result.cells.size();
    echo["trials_per_cell"] = spec.trials;
    echo["out_dir"] = options.out_dir;
    for (const CellSummary& cell : result.cells) {
        echo["summary"].push_back(json{{"n", cell.n},
                                       {"k", cell.k},
                                       {"median", std::isinf(cell.median) ? json("inf") : json(cell.median)},
                                       {"success_rate", cell.success_rate},
                                       {"timeouts", cell.timeouts}});
    }
    std::cout << echo.dump(2) << std::endl;
    return 0;
}

int run_bounds_command(const std::string& kind, double h, double T, double s, double D, double lambda, double R) {
    json out;
    out["spec_version"] = kSpecVersion;
    out["kind"] = kind;
    const BernsteinParams params{D, s};
    if (kind == "bernstein") {
        out["lambda"] = lambda;
        out["bound"] = bernstein_bound(params, lambda);
    } else if (kind == "freedman") {
        out["h"] = h;
        out["T"] = T;
        out["tail"] = freedman_tail(h, T, params);
    } else if (kind == "drift") {
        DriftQuery query;
        query.R = R;
        query.h = h;
        query.T = T;
        query.params = params;
        const DriftDirection direction = R < 0.0 ? DriftDirection::Negative : DriftDirection::Positive;
        out["R"] = R;
        out["h"] = h;
        out["T"] = T;
        out["direction"] = direction == DriftDirection::Negative ? "negative" : "positive";
        out["tail"] = drift_tail(query, direction);
    } else {
        throw SpecError("bounds: kind must be bernstein, freedman or drift");
    }
    out["D"] = D;
    out["s"] = s;
    std::cout << out.dump(2) << std::endl;
    return 0;
}

int run_verify_command(const std::string& budget) {
    const VerifyReport report = run_verification(budget);
    for (const VerifyCheck& check : report.checks) {
        std::cout << (check.passed ? "PASS" : "FAIL") << "  " << check.name << "  instances=" << check.instances
                  << "  max_deviation=" << format_double(check.max_deviation) << "  (" << check.detail << ")\n";
    }
    std::cout << (report.all_passed() ? "verification passed" : "verification FAILED") << std::endl;
    return report.all_passed() ? 0 : 1;
}

void add_sweep_flags(CLI::App* cmd, SweepOptions& options, bool wants_k = true) {
    cmd->add_option("--protocol", options.protocol, "3maj | 2choices | async3maj");
    cmd->add_option("--n", options.n_values, "population sizes")->delimiter(',');
    if (wants_k) cmd->add_option("--k", options.k_values, "opinion counts")->delimiter(',');
    cmd->add_option("--init", options.init, "balanced | planted | singleton | explicit");
    cmd->add_option("--bias", options.bias, "planted-bias fraction");
    cmd->add_option("--counts", options.counts, "explicit initial counts")->delimiter(',');
    cmd->add_option("--trials", options.trials, "trials per cell");
    cmd->add_option("--max-rounds", options.max_rounds, "horizon (0 = experiment default)");
    cmd->add_option("--seed", options.seed, "master seed (default 42)");
    cmd->add_option("--out", options.out_dir, "output directory");
    cmd->add_option("--spec", options.spec_file, "JSON spec file (overrides flags)");
    cmd->add_option("--tracked-pair", options.tracked, "two opinion indices")->delimiter(',');
    cmd->add_flag("--naive", options.naive, "use the per-vertex reference stepper");
    cmd->add_option("--threads", options.threads, "worker threads (default: OD_LAB_THREADS or OpenMP)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"odlab: consensus-dynamics simulation laboratory"};
    app.require_subcommand(1);

    SimulateOptions simulate;
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "single run with a full trace");
    simulate_cmd->add_option("--protocol", simulate.protocol, "3maj | 2choices | async3maj");
    simulate_cmd->add_option("--n", simulate.n, "population size");
    simulate_cmd->add_option("--k", simulate.k, "opinion count");
    simulate_cmd->add_option("--init", simulate.init, "balanced | planted | singleton | explicit");
    simulate_cmd->add_option("--bias", simulate.bias, "planted-bias fraction");
    simulate_cmd->add_option("--counts", simulate.counts, "explicit initial counts")->delimiter(',');
    simulate_cmd->add_option("--max-rounds", simulate.max_rounds, "horizon (0 = generous default)");
    simulate_cmd->add_option("--seed", simulate.seed, "seed (default 42)");
    simulate_cmd->add_option("--out", simulate.out_dir, "output directory");
    simulate_cmd->add_option("--tracked-pair", simulate.tracked, "two opinion indices")->delimiter(',');
    simulate_cmd->add_flag("--naive", simulate.naive, "use the per-vertex reference stepper");

    SweepOptions sweep, plurality, lowerbound, normgrowth, weakvanish, biasamp;
    add_sweep_flags(app.add_subcommand("sweep", "consensus-time sweep over (n, k)"), sweep);

    CLI::App* plurality_cmd = app.add_subcommand("plurality", "planted-bias plurality consensus");
    plurality.init = "planted";
    add_sweep_flags(plurality_cmd, plurality);
    plurality_cmd->add_option("--bias-factor", plurality.bias_factor, "margin factor (default 4)");

    CLI::App* lowerbound_cmd = app.add_subcommand("lowerbound", "balanced-init lower-bound check");
    add_sweep_flags(lowerbound_cmd, lowerbound);
    lowerbound_cmd->add_option("--divisor", lowerbound.lower_divisor, "success threshold k/divisor (default 20)");

    CLI::App* normgrowth_cmd = app.add_subcommand("normgrowth", "first passage of the squared norm");
    normgrowth.init = "singleton";
    add_sweep_flags(normgrowth_cmd, normgrowth, false);
    normgrowth_cmd->add_option("--cstar", normgrowth.cstar, "norm threshold constant (default 1)");
    normgrowth_cmd->add_option("--horizon-scale", normgrowth.horizon_scale, "horizon constant (default 50)");

    CLI::App* weakvanish_cmd = app.add_subcommand("weakvanish", "vanishing time of a planted weak opinion");
    weakvanish.init = "explicit";
    add_sweep_flags(weakvanish_cmd, weakvanish);
    weakvanish_cmd->add_option("--window", weakvanish.window, "success window constant (default 20)");

    CLI::App* biasamp_cmd = app.add_subcommand("biasamp", "first bias/weak event for a tracked pair");
    add_sweep_flags(biasamp_cmd, biasamp);
    biasamp_cmd->add_option("--window", biasamp.window, "success window constant (default 50)");
    biasamp_cmd->add_option("--cstar", biasamp.cstar, "bias threshold constant (default 1)");

    std::string verify_budget = "small";
    CLI::App* verify_cmd = app.add_subcommand("verify", "run the exact-oracle suite");
    verify_cmd->add_option("--budget", verify_budget, "small | full");

    std::string bounds_kind;
    double bounds_h = 0.0, bounds_T = 0.0, bounds_s = 0.0, bounds_D = 0.0, bounds_lambda = 0.0, bounds_R = 0.0;
    CLI::App* bounds_cmd = app.add_subcommand("bounds", "evaluate a concentration bound");
    bounds_cmd->set_help_flag("--help", "print help");  // frees -h for the displacement flag
    bounds_cmd->add_option("kind", bounds_kind, "bernstein | freedman | drift")->required();
    bounds_cmd->add_option("--h", bounds_h, "displacement");
    bounds_cmd->add_option("--T", bounds_T, "horizon");
    bounds_cmd->add_option("--s", bounds_s, "variance proxy");
    bounds_cmd->add_option("--D", bounds_D, "jump scale");
    bounds_cmd->add_option("--lambda", bounds_lambda, "MGF argument");
    bounds_cmd->add_option("--R", bounds_R, "per-step drift");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        nlohmann::json err;
        err["error"] = std::string(e.what());
        std::cerr << err.dump() << std::endl;
        return 1;
    }

    try {
        if (*simulate_cmd) return run_simulate(simulate);
        if (app.got_subcommand("sweep")) return run_sweep_command(ExperimentKind::Scaling, sweep);
        if (*plurality_cmd) return run_sweep_command(ExperimentKind::Plurality, plurality);
        if (*lowerbound_cmd) return run_sweep_command(ExperimentKind::LowerBound, lowerbound);
        if (*normgrowth_cmd) return run_sweep_command(ExperimentKind::NormGrowth, normgrowth);
        if (*weakvanish_cmd) return run_sweep_command(ExperimentKind::WeakVanish, weakvanish);
        if (*biasamp_cmd) return run_sweep_command(ExperimentKind::BiasAmplification, biasamp);
        if (*verify_cmd) return run_verify_command(verify_budget);
        if (*bounds_cmd) return run_bounds_command(bounds_kind, bounds_h, bounds_T, bounds_s, bounds_D, bounds_lambda, bounds_R);
    } catch (const SpecError& e) {
        nlohmann::json err;
        err["error"] = std::string(e.what());
        std::cerr << err.dump() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = std::string("internal: ") + e.what();
        std::cerr << err.dump() << std::endl;
        return 2;
    }
    return 2;
}
