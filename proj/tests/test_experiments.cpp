#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "odlab/errors.hpp"
#include "odlab/experiments.hpp"
#include "odlab/io.hpp"
#include "odlab/kernel.hpp"

using namespace odlab;

namespace {

ExperimentSpec small_scaling_spec() {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::Scaling;
    spec.protocol = ProtocolKind::Sync3Majority;
    spec.n_values = {512};
    spec.k_values = {2, 4};
    spec.trials = 16;
    spec.seed = 1234;
    return spec;
}

double median_consensus(const ExperimentResult& result, std::int64_t n, std::int64_t k) {
    for (const CellSummary& cell : result.cells)
        if (cell.n == n && cell.k == k) return cell.median;
    FAIL("cell not found");
    return 0.0;
}

}  // namespace

TEST_CASE("log-log fit recovers exact power laws") {
    std::vector<std::pair<double, double>> linear, sqrt_points;
    for (double k : {4.0, 8.0, 16.0, 32.0, 64.0}) {
        linear.emplace_back(k, k);
        sqrt_points.emplace_back(k, std::sqrt(k));
    }
    const LogLogFit one = fit_loglog_slope(linear);
    CHECK(one.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(one.r2 == doctest::Approx(1.0).epsilon(1e-12));
    const LogLogFit half = fit_loglog_slope(sqrt_points);
    CHECK(half.slope == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(fit_loglog_slope({{2.0, 3.0}, {4.0, 5.0}}), DegenerateInput);
    CHECK_THROWS_AS(fit_loglog_slope({{2.0, 3.0}, {2.0, 5.0}, {2.0, 7.0}}), DegenerateInput);
    CHECK_THROWS_AS(fit_loglog_slope({{2.0, 0.0}, {4.0, 5.0}, {8.0, 7.0}}), DegenerateInput);
}

TEST_CASE("single-opinion cells reach consensus immediately") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::Scaling;
    spec.n_values = {64};
    spec.k_values = {1};
    spec.trials = 5;
    const ExperimentResult result = run_experiment(spec);
    for (const TrialResult& trial : result.trials) CHECK(trial.consensus_time == 0);
    CHECK(result.cells[0].median == 0.0);
    CHECK(result.cells[0].success_rate == 1.0);
}

TEST_CASE("experiment output is byte-stable across reruns and thread counts") {
    ExperimentSpec spec = small_scaling_spec();
    spec.threads = 1;
    const ExperimentResult first = run_experiment(spec);
    spec.threads = 4;
    const ExperimentResult second = run_experiment(spec);
    CHECK(trials_csv(first) == trials_csv(second));
    CHECK(summary_csv(first) == summary_csv(second));

    const ExperimentResult third = run_experiment(spec);
    CHECK(trials_csv(second) == trials_csv(third));
}

TEST_CASE("deleting a cell leaves the other cells untouched") {
    ExperimentSpec both = small_scaling_spec();
    const ExperimentResult full = run_experiment(both);

    ExperimentSpec only = both;
    only.k_values = {4};
    const ExperimentResult part = run_experiment(only);

    for (const TrialResult& trial : part.trials) {
        const auto match = std::find_if(full.trials.begin(), full.trials.end(), [&](const TrialResult& other) {
            return other.k == trial.k && other.trial == trial.trial;
        });
        REQUIRE(match != full.trials.end());
        CHECK(match->consensus_time == trial.consensus_time);
        CHECK(match->winner == trial.winner);
    }
}

TEST_CASE("success rates never decrease with a longer horizon") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::Scaling;
    spec.protocol = ProtocolKind::Sync3Majority;
    spec.n_values = {256};
    spec.k_values = {4};
    spec.trials = 24;
    spec.seed = 77;
    spec.max_rounds = 4;
    const ExperimentResult short_run = run_experiment(spec);
    spec.max_rounds = 64;
    const ExperimentResult long_run = run_experiment(spec);
    CHECK(long_run.cells[0].success_rate >= short_run.cells[0].success_rate);
}

TEST_CASE("planted bias init is integral and keeps the promised margin") {
    for (const std::int64_t n : {1000, 10000, 65536}) {
        for (const int k : {2, 5, 10}) {
            const double bias = plurality_bias(ProtocolKind::Sync3Majority, n, k, 4.0);
            const Configuration config = planted_bias_config(n, k, bias);
            std::int64_t total = 0;
            for (std::int64_t c : config.counts) total += c;
            CHECK(total == n);
            const auto alpha = fractions(config);
            for (int j = 1; j < k; ++j) CHECK(alpha[0] - alpha[j] >= bias - 2.0 / static_cast<double>(n));
        }
    }
    // 2-Choices margin solves the self-consistent fixed point
    const double bias = plurality_bias(ProtocolKind::Sync2Choices, 10000, 10, 4.0);
    const double alpha1 = 0.1 + bias * 0.9;
    CHECK(bias == doctest::Approx(4.0 * std::sqrt(alpha1 * std::log(10000.0) / 10000.0)).epsilon(1e-9));
}

TEST_CASE("spec JSON round-trips byte-for-byte") {
    ExperimentSpec spec = small_scaling_spec();
    spec.kind = ExperimentKind::BiasAmplification;
    spec.tracked_pair = std::make_pair(0, 1);
    spec.thresholds.x_delta = 0.25;
    spec.constants.bias_amp_window = 33.0;
    const std::string once = spec_json(spec);
    const std::string twice = spec_json(parse_spec_json(once));
    CHECK(once == twice);

    CHECK_THROWS_AS(parse_spec_json("{not json"), SpecError);
    CHECK_THROWS_AS(parse_spec_json("{\"experiment\":\"scaling\"}"), SpecError);
}

TEST_CASE("weak vanish identifies and eliminates the planted weak opinion") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::WeakVanish;
    spec.protocol = ProtocolKind::Sync3Majority;
    spec.n_values = {1000};
    spec.k_values = {3};
    spec.init.kind = InitKind::Explicit;
    spec.init.counts = {450, 450, 100};
    spec.trials = 30;
    spec.seed = 99;
    const ExperimentResult result = run_experiment(spec);
    int vanished = 0;
    for (const TrialResult& trial : result.trials) {
        CHECK(trial.tau_weak == 0);  // planted opinion is weak from the start
        if (trial.winner) CHECK(*trial.winner != 2);
        if (trial.success) ++vanished;
    }
    CHECK(vanished >= 24);  // generous: the window is far beyond typical vanish times
}

TEST_CASE("bias amplification fires an event from the balanced start") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::BiasAmplification;
    spec.protocol = ProtocolKind::Sync3Majority;
    spec.n_values = {1000};
    spec.k_values = {4};
    spec.trials = 30;
    spec.seed = 100;
    spec.tracked_pair = std::make_pair(0, 1);
    const ExperimentResult result = run_experiment(spec);
    int fired = 0;
    for (const TrialResult& trial : result.trials)
        if (trial.first_event) ++fired;
    CHECK(fired >= 27);
    CHECK(result.cells[0].success_rate >= 0.8);
}

TEST_CASE("norm growth hits the threshold immediately when it starts above it") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::NormGrowth;
    spec.protocol = ProtocolKind::Sync3Majority;
    spec.n_values = {100};
    spec.k_values = {2};
    spec.init.kind = InitKind::Balanced;  // gamma0 = 0.5 >= log(100)/10
    spec.trials = 4;
    const ExperimentResult result = run_experiment(spec);
    for (const TrialResult& trial : result.trials) {
        CHECK(trial.tau_plus_gamma == 0);
        CHECK(trial.success);
    }
}

TEST_CASE("async consensus times divided by n track the synchronous medians") {
    ExperimentSpec sync_spec;
    sync_spec.kind = ExperimentKind::Scaling;
    sync_spec.protocol = ProtocolKind::Sync3Majority;
    sync_spec.n_values = {256};
    sync_spec.k_values = {2};
    sync_spec.trials = 31;
    sync_spec.seed = 4242;
    const ExperimentResult sync_result = run_experiment(sync_spec);

    ExperimentSpec async_spec = sync_spec;
    async_spec.protocol = ProtocolKind::Async3Majority;
    const ExperimentResult async_result = run_experiment(async_spec);

    const double sync_median = median_consensus(sync_result, 256, 2);
    const double async_median = median_consensus(async_result, 256, 2) / 256.0;
    REQUIRE(std::isfinite(sync_median));
    REQUIRE(std::isfinite(async_median));
    const double factor = 10.0 * std::log(256.0);
    CHECK(async_median <= sync_median * factor);
    CHECK(async_median >= sync_median / factor);
}

TEST_CASE("consensus-time medians trend upward in k") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::Scaling;
    spec.protocol = ProtocolKind::Sync3Majority;
    spec.n_values = {4096};
    spec.k_values = {2, 4, 8, 16, 32};
    spec.trials = 20;
    spec.seed = 31337;
    const ExperimentResult result = run_experiment(spec);
    // medians sorted by k: Spearman correlation of ranks > 0.9
    std::vector<double> medians;
    for (const CellSummary& cell : result.cells) medians.push_back(cell.median);
    int inversions = 0;
    for (std::size_t a = 0; a < medians.size(); ++a)
        for (std::size_t b = a + 1; b < medians.size(); ++b)
            if (medians[a] >= medians[b]) ++inversions;
    CHECK(inversions == 0);  // strictly increasing implies Spearman 1
}

TEST_CASE("spec validation rejects malformed sweeps") {
    ExperimentSpec spec = small_scaling_spec();
    spec.trials = 0;
    CHECK_THROWS_AS(spec.validate(), SpecError);

    spec = small_scaling_spec();
    spec.k_values = {1024};  // k > n
    CHECK_THROWS_AS(spec.validate(), SpecError);

    spec = small_scaling_spec();
    spec.kind = ExperimentKind::WeakVanish;  // needs explicit init
    CHECK_THROWS_AS(spec.validate(), SpecError);
}

TEST_CASE("naive cross-validation cells agree with the fast stepper in distribution") {
    // medians of the same spec under the two steppers stay within a small factor
    ExperimentSpec fast = small_scaling_spec();
    fast.trials = 31;
    ExperimentSpec naive = fast;
    naive.use_naive_stepper = true;
    const ExperimentResult fast_result = run_experiment(fast);
    const ExperimentResult naive_result = run_experiment(naive);
    for (const std::int64_t k : {2, 4}) {
        const double mf = median_consensus(fast_result, 512, k);
        const double mn = median_consensus(naive_result, 512, k);
        CHECK(mf <= 3.0 * mn + 8.0);
        CHECK(mn <= 3.0 * mf + 8.0);
    }
}
