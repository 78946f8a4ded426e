#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "odlab/errors.hpp"
#include "odlab/kernel.hpp"
#include "odlab/oracle.hpp"
#include "odlab/rng.hpp"
#include "odlab/step.hpp"

using namespace odlab;

namespace {

// Destination law of a single vertex straight from the update rules, as an
// independent check of the closed-form kernels.
std::vector<double> brute_force_3majority(const std::vector<double>& alpha) {
    const int k = static_cast<int>(alpha.size());
    std::vector<double> law(k, 0.0);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            for (int c = 0; c < k; ++c)
                law[a == b ? a : c] += alpha[a] * alpha[b] * alpha[c];
    return law;
}

Configuration make_config(std::vector<std::int64_t> counts) {
    std::int64_t n = 0;
    for (std::int64_t c : counts) n += c;
    return explicit_config(n, std::move(counts));
}

Configuration random_config(RandomStream& rng, std::int64_t max_n, int max_k) {
    const int k = 1 + static_cast<int>(rng.uniform_below(max_k));
    const std::int64_t n = 1 + rng.uniform_below(max_n);
    std::vector<std::int64_t> counts(k, 0);
    for (std::int64_t v = 0; v < n; ++v) counts[rng.uniform_below(k)] += 1;
    return explicit_config(n, std::move(counts));
}

double chi_square_pvalue(const std::map<std::vector<std::int64_t>, std::int64_t>& observed,
                         const CountDistribution& expected,
                         std::int64_t draws) {
    double statistic = 0.0;
    std::int64_t seen = 0;
    for (const auto& [vec, prob] : expected.pmf) {
        const auto it = observed.find(vec);
        const double obs = it == observed.end() ? 0.0 : static_cast<double>(it->second);
        seen += it == observed.end() ? 0 : it->second;
        const double exp_count = prob * static_cast<double>(draws);
        REQUIRE(exp_count > 0.0);
        statistic += (obs - exp_count) * (obs - exp_count) / exp_count;
    }
    REQUIRE(seen == draws);  // no mass outside the enumerated support
    boost::math::chi_squared dist(static_cast<double>(expected.pmf.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

TEST_CASE("3-majority kernel matches frozen values") {
    const StepKernel mono = kernel_3majority(make_config({7, 0}));
    CHECK(mono.dest[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mono.dest[1] == doctest::Approx(0.0).epsilon(1e-15));

    const StepKernel even = kernel_3majority(make_config({5, 5}));
    CHECK(even.dest[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(even.dest[1] == doctest::Approx(0.5).epsilon(1e-15));

    const StepKernel skew = kernel_3majority(make_config({5, 3, 2}));
    CHECK(skew.gamma == doctest::Approx(0.38).epsilon(1e-15));
    CHECK(skew.dest[0] == doctest::Approx(0.56).epsilon(1e-13));
    CHECK(skew.dest[1] == doctest::Approx(0.276).epsilon(1e-13));
    CHECK(skew.dest[2] == doctest::Approx(0.164).epsilon(1e-13));
}

TEST_CASE("3-majority kernel equals the neighbor-triple enumeration") {
    RandomStream rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const Configuration config = random_config(rng, 500, 5);
        const StepKernel kernel = kernel_3majority(config);
        const std::vector<double> law = brute_force_3majority(fractions(config));
        for (int i = 0; i < config.k(); ++i) CHECK(kernel.dest[i] == doctest::Approx(law[i]).epsilon(1e-13));
    }
}

TEST_CASE("2-choices kernel matches frozen values") {
    const StepKernel mono = kernel_2choices(make_config({6, 0}));
    CHECK(mono.stay[0] == doctest::Approx(1.0).epsilon(1e-15));

    const StepKernel even = kernel_2choices(make_config({4, 4}));
    CHECK(even.stay[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(even.stay[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(even.row(0, 1) == doctest::Approx(0.25).epsilon(1e-15));

    const StepKernel skew = kernel_2choices(make_config({5, 3, 2}));
    CHECK(skew.stay[0] == doctest::Approx(0.87).epsilon(1e-14));
    CHECK(skew.stay[1] == doctest::Approx(0.71).epsilon(1e-14));
    CHECK(skew.stay[2] == doctest::Approx(0.66).epsilon(1e-14));
    CHECK(skew.row(1, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(skew.row(1, 2) == doctest::Approx(0.04).epsilon(1e-15));
    for (int j = 0; j < 3; ++j) {
        double row = skew.stay[j];
        for (int i = 0; i < 3; ++i)
            if (i != j) row += skew.row(j, i);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-14));
    }

    // expected next fraction stays put at the symmetric point
    const double expected = 0.5 * even.stay[0] + 0.5 * even.row(1, 0);
    CHECK(expected == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("kernel stochasticity holds on randomized configurations") {
    RandomStream rng(123);
    for (int trial = 0; trial < 1000; ++trial) {
        const Configuration config = random_config(rng, 1000000, 32);
        const StepKernel maj = kernel_3majority(config);
        double sum = 0.0;
        for (double f : maj.dest) {
            CHECK(f >= -1e-15);
            sum += f;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);

        const StepKernel two = kernel_2choices(config);
        for (int j = 0; j < config.k(); ++j) {
            if (config.counts[j] == 0) continue;
            double row = two.stay[j];
            for (int i = 0; i < config.k(); ++i)
                if (i != j) row += two.dest_sq[i];
            CHECK(std::abs(row - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("steppers preserve consensus and never resurrect opinions") {
    RandomStream rng(7);
    const Configuration mono = make_config({9, 0, 0});
    for (ProtocolKind protocol : {ProtocolKind::Sync3Majority, ProtocolKind::Sync2Choices}) {
        for (int rep = 0; rep < 100; ++rep) {
            CHECK(step_naive(mono, protocol, rng).counts == mono.counts);
            CHECK(step_fast(mono, protocol, rng).counts == mono.counts);
        }
    }
    for (int rep = 0; rep < 100; ++rep) CHECK(step_async(mono, rng).counts == mono.counts);

    for (ProtocolKind protocol : {ProtocolKind::Sync3Majority, ProtocolKind::Sync2Choices}) {
        for (int rep = 0; rep < 300; ++rep) {
            const Configuration config = random_config(rng, 200, 6);
            for (const Configuration& next : {step_naive(config, protocol, rng), step_fast(config, protocol, rng)}) {
                std::int64_t total = 0;
                for (int i = 0; i < config.k(); ++i) {
                    total += next.counts[i];
                    if (config.counts[i] == 0) CHECK(next.counts[i] == 0);
                }
                CHECK(total == config.n);
            }
        }
    }
}

TEST_CASE("single-opinion and single-vertex configurations are fixed points") {
    RandomStream rng(11);
    const Configuration one = make_config({1});
    CHECK(step_naive(one, ProtocolKind::Sync3Majority, rng).counts == one.counts);
    CHECK(step_fast(one, ProtocolKind::Sync2Choices, rng).counts == one.counts);
    CHECK(step_async(one, rng).counts == one.counts);
}

TEST_CASE("naive one-step counts match the enumerated law (chi-square)") {
    const Configuration config = make_config({3, 1, 1});
    const CountDistribution law = enumerate_step_pmf(config, ProtocolKind::Sync3Majority);
    RandomStream rng(2024);
    std::map<std::vector<std::int64_t>, std::int64_t> observed;
    const std::int64_t draws = 1000000;
    for (std::int64_t d = 0; d < draws; ++d) observed[step_naive(config, ProtocolKind::Sync3Majority, rng).counts] += 1;
    CHECK(chi_square_pvalue(observed, law, draws) > 0.001);
}

TEST_CASE("fast one-step counts match the enumerated law (chi-square)") {
    const Configuration config = make_config({3, 1, 1});
    for (ProtocolKind protocol : {ProtocolKind::Sync3Majority, ProtocolKind::Sync2Choices}) {
        CAPTURE(protocol_name(protocol));
        const CountDistribution law = enumerate_step_pmf(config, protocol);
        RandomStream rng(4048);
        std::map<std::vector<std::int64_t>, std::int64_t> observed;
        const std::int64_t draws = 400000;
        for (std::int64_t d = 0; d < draws; ++d) observed[step_fast(config, protocol, rng).counts] += 1;
        CHECK(chi_square_pvalue(observed, law, draws) > 0.001);
    }
}

TEST_CASE("sparse and dense 2-choices splits agree with the naive law") {
    // many opinions, few switchers per origin: exercises the per-switcher
    // categorical path against the per-vertex reference.
    const Configuration config = balanced_config(64, 32);
    RandomStream rng(515);
    const int draws = 60000;
    std::map<std::int64_t, double> fast_hist, naive_hist;
    for (int d = 0; d < draws; ++d) {
        fast_hist[step_fast(config, ProtocolKind::Sync2Choices, rng).counts[0]] += 1.0;
        naive_hist[step_naive(config, ProtocolKind::Sync2Choices, rng).counts[0]] += 1.0;
    }
    // two-sample chi-square over the marginal count of opinion 0
    double statistic = 0.0;
    int bins = 0;
    for (const auto& [value, fast_count] : fast_hist) {
        const double naive_count = naive_hist.count(value) ? naive_hist[value] : 0.0;
        if (fast_count + naive_count < 10.0) continue;  // merge-by-skip for sparse tail bins
        statistic += (fast_count - naive_count) * (fast_count - naive_count) / (fast_count + naive_count);
        ++bins;
    }
    boost::math::chi_squared dist(static_cast<double>(bins - 1));
    CHECK(boost::math::cdf(boost::math::complement(dist, statistic)) > 0.001);
}

TEST_CASE("async step moves at most one vertex") {
    RandomStream rng(31);
    Configuration config = make_config({4, 3, 3});
    for (int rep = 0; rep < 2000; ++rep) {
        const Configuration next = step_async(config, rng);
        std::int64_t l1 = 0, total = 0;
        for (int i = 0; i < config.k(); ++i) {
            l1 += std::abs(next.counts[i] - config.counts[i]);
            total += next.counts[i];
        }
        CHECK(l1 <= 2);
        CHECK(total == config.n);
        config = next;
        if (config.is_consensus()) config = make_config({4, 3, 3});
    }
}

TEST_CASE("async transition probabilities at the two-vertex split") {
    // from (1,1) the updater redraws; each destination is equally likely,
    // so the state moves to either consensus with probability 1/4 each.
    RandomStream rng(88);
    const Configuration config = make_config({1, 1});
    int to_first = 0, to_second = 0, stayed = 0;
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) {
        const Configuration next = step_async(config, rng);
        if (next.counts[0] == 2) ++to_first;
        else if (next.counts[1] == 2) ++to_second;
        else ++stayed;
    }
    CHECK(to_first / static_cast<double>(draws) == doctest::Approx(0.25).epsilon(0.05));
    CHECK(to_second / static_cast<double>(draws) == doctest::Approx(0.25).epsilon(0.05));
    CHECK(stayed / static_cast<double>(draws) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("identical seeds reproduce identical trajectories") {
    for (StepperKind stepper : {StepperKind::Fast, StepperKind::Naive}) {
        std::vector<std::vector<std::int64_t>> first, second;
        for (int rep = 0; rep < 2; ++rep) {
            RandomStream rng = RandomStream::derive(5, 100, 4, 0, "trial");
            Configuration config = balanced_config(100, 4);
            auto& sink = rep == 0 ? first : second;
            for (int t = 0; t < 50; ++t) {
                config = stepper == StepperKind::Fast ? step_fast(config, ProtocolKind::Sync3Majority, rng)
                                                      : step_naive(config, ProtocolKind::Sync3Majority, rng);
                sink.push_back(config.counts);
            }
        }
        CHECK(first == second);
    }
}

TEST_CASE("run handles the trivial boundary cases") {
    RandomStream rng(3);
    const RunResult mono = run(ProtocolKind::Sync3Majority, make_config({5, 0}), 100, rng);
    CHECK(mono.consensus_time == 0);
    CHECK(mono.winner == 0);

    const RunResult stopped = run(ProtocolKind::Sync2Choices, make_config({3, 2}), 0, rng);
    CHECK(stopped.timed_out());
    CHECK(stopped.rounds_executed == 0);
    CHECK(stopped.final_config.counts == std::vector<std::int64_t>{3, 2});

    CHECK_THROWS_AS(run(ProtocolKind::Sync3Majority, make_config({3, 2}), -1, rng), SpecError);
}

TEST_CASE("two-vertex consensus time averages 2 rounds") {
    RandomStream rng(17);
    double total = 0.0;
    const int trials = 20000;
    for (int trial = 0; trial < trials; ++trial) {
        const RunResult result = run(ProtocolKind::Sync3Majority, make_config({1, 1}), 10000, rng, {}, StepperKind::Naive);
        REQUIRE(result.consensus_time.has_value());
        total += static_cast<double>(*result.consensus_time);
    }
    const double mean = total / trials;
    // geometric(1/2): mean 2, variance 2; allow 4 standard errors
    CHECK(std::abs(mean - 2.0) < 4.0 * std::sqrt(2.0 / trials));
}

TEST_CASE("naive stepper rejects the asynchronous protocol") {
    RandomStream rng(1);
    CHECK_THROWS_AS(step_naive(make_config({1, 1}), ProtocolKind::Async3Majority, rng), SpecError);
    CHECK_THROWS_AS(step_fast(make_config({1, 1}), ProtocolKind::Async3Majority, rng), SpecError);
}
