#include "odlab/verify.hpp"

#include <cmath>
#include <functional>

#include "odlab/bounds.hpp"
#include "odlab/errors.hpp"
#include "odlab/kernel.hpp"
#include "odlab/oracle.hpp"
#include "odlab/rng.hpp"

namespace odlab {

namespace {

void for_each_configuration(std::int64_t max_n, int max_k, const std::function<void(const Configuration&)>& visit) {
    for (int k = 1; k <= max_k; ++k) {
        for (std::int64_t n = 1; n <= max_n; ++n) {
            std::vector<std::int64_t> counts(k, 0);
            const std::function<void(int, std::int64_t)> rec = [&](int idx, std::int64_t left) {
                if (idx == k - 1) {
                    counts[idx] = left;
                    visit(explicit_config(n, counts));
                    return;
                }
                for (std::int64_t c = 0; c <= left; ++c) {
                    counts[idx] = c;
                    rec(idx + 1, left - c);
                }
            };
            rec(0, n);
        }
    }
}

VerifyCheck check_law_equivalence(std::int64_t max_n, int max_k) {
    VerifyCheck check;
    check.name = "law-equivalence";
    for (ProtocolKind protocol : {ProtocolKind::Sync3Majority, ProtocolKind::Sync2Choices}) {
        for_each_configuration(max_n, max_k, [&](const Configuration& config) {
            const double tv = tv_distance(enumerate_step_pmf(config, protocol), fast_target_pmf(config, protocol));
            check.max_deviation = std::max(check.max_deviation, tv);
            check.instances += 1;
        });
    }
    check.passed = check.max_deviation <= 1e-12;
    check.detail = "max TV between enumerated and fast-target one-step laws";
    return check;
}

VerifyCheck check_normalization(std::int64_t max_n, int max_k) {
    VerifyCheck check;
    check.name = "pmf-normalization";
    for (ProtocolKind protocol : {ProtocolKind::Sync3Majority, ProtocolKind::Sync2Choices}) {
        for_each_configuration(max_n, max_k, [&](const Configuration& config) {
            check.max_deviation = std::max(check.max_deviation, std::abs(enumerate_step_pmf(config, protocol).total_mass() - 1.0));
            check.instances += 1;
        });
    }
    check.passed = check.max_deviation <= 1e-12;
    check.detail = "enumerated laws normalize to 1";
    return check;
}

VerifyCheck check_moments(std::int64_t max_n, int max_k) {
    VerifyCheck check;
    check.name = "moment-identities";
    for (ProtocolKind protocol : {ProtocolKind::Sync3Majority, ProtocolKind::Sync2Choices}) {
        for_each_configuration(max_n, max_k, [&](const Configuration& config) {
            const ExactMoments moments = exact_moments(config, protocol);
            const auto alpha = fractions(config);
            const double gamma = squared_norm(config);
            const double n = static_cast<double>(config.n);
            for (int i = 0; i < config.k(); ++i) {
                const double expected = alpha[i] * (1.0 + alpha[i] - gamma);
                check.max_deviation = std::max(check.max_deviation, std::abs(moments.e_alpha[i] - expected));
                const double var_cap = protocol == ProtocolKind::Sync3Majority
                                           ? alpha[i] / n
                                           : alpha[i] * (alpha[i] + gamma) / n;
                check.max_deviation = std::max(check.max_deviation, moments.var_alpha[i] - var_cap);
            }
            const double drift = protocol == ProtocolKind::Sync3Majority
                                     ? (1.0 - gamma) / n
                                     : (1.0 - std::sqrt(gamma)) * (1.0 - gamma) * gamma / n;
            check.max_deviation = std::max(check.max_deviation, gamma + drift - moments.e_gamma);
            check.instances += 1;
        });
    }
    check.passed = check.max_deviation <= 1e-12;
    check.detail = "mean identity, variance caps and norm drift from the enumerated law";
    return check;
}

VerifyCheck check_kernel_stochasticity(int configs) {
    VerifyCheck check;
    check.name = "kernel-stochasticity";
    RandomStream rng = RandomStream::derive(20240901, 0, 0, 0, "kernel-check");
    for (int c = 0; c < configs; ++c) {
        const int k = 1 + static_cast<int>(rng.uniform_below(64));
        const std::int64_t n = k + rng.uniform_below(1000000);
        Configuration config = balanced_config(n, k);
        // random redistribution keeps the sum at n
        for (int moves = 0; moves < 4 * k; ++moves) {
            const int from = static_cast<int>(rng.uniform_below(k));
            const int to = static_cast<int>(rng.uniform_below(k));
            if (config.counts[from] == 0) continue;
            const std::int64_t amount = rng.uniform_below(config.counts[from] + 1);
            config.counts[from] -= amount;
            config.counts[to] += amount;
        }

        const StepKernel maj = kernel_3majority(config);
        double sum = 0.0;
        for (double f : maj.dest) {
            sum += f;
            if (f < -1e-15 || f > 1.0 + 1e-12) check.max_deviation = std::max(check.max_deviation, 1.0);
        }
        check.max_deviation = std::max(check.max_deviation, std::abs(sum - 1.0));

        const StepKernel two = kernel_2choices(config);
        for (int j = 0; j < k; ++j) {
            if (config.counts[j] == 0) continue;
            double row = two.stay[j];
            for (int i = 0; i < k; ++i)
                if (i != j) row += two.dest_sq[i];
            check.max_deviation = std::max(check.max_deviation, std::abs(row - 1.0));
        }
        check.instances += 1;
    }
    check.passed = check.max_deviation <= 1e-12;
    check.detail = "destination law and per-origin rows sum to 1 on randomized configurations";
    return check;
}

VerifyCheck check_bernstein_grid() {
    VerifyCheck check;
    check.name = "bernstein-mgf";
    for (const std::int64_t n : {20, 50, 200}) {
        for (const double alpha : {0.1, 0.3, 0.5}) {
            const auto share = static_cast<std::int64_t>(std::llround(alpha * static_cast<double>(n)));
            const Configuration config = explicit_config(n, {share, n - share});
            const BernsteinParams params{1.0 / static_cast<double>(n), alpha / static_cast<double>(n)};
            std::vector<double> grid;
            const double span = 0.9 * 3.0 * static_cast<double>(n);
            for (int g = 0; g < 101; ++g) grid.push_back(-span + 2.0 * span * g / 100.0);
            const BernsteinReport report = check_bernstein(
                [&](double lambda) { return exact_mgf_alpha_3maj(config, 0, lambda); }, params, grid);
            for (const BernsteinViolation& violation : report.violations)
                check.max_deviation = std::max(check.max_deviation, violation.mgf - violation.bound);
            check.instances += static_cast<std::int64_t>(grid.size());
        }
    }
    check.passed = check.max_deviation <= 0.0;
    check.detail = "exact centered-binomial MGF stays under the Bernstein envelope";
    return check;
}

VerifyCheck check_tail_evaluators() {
    VerifyCheck check;
    check.name = "tail-evaluators";
    const auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };

    check.max_deviation = std::max(check.max_deviation, rel(bernstein_bound({0.02, 0.006}, 10.0), 1.3790964956153898));
    check.max_deviation = std::max(check.max_deviation, rel(freedman_tail(0.1, 100.0, {0.01, 1e-4}), 0.6163927313272270));
    DriftQuery query;
    query.R = -0.01;
    query.h = 1.0;
    query.T = 200.0;
    query.params = {0.01, 1e-4};
    check.max_deviation = std::max(check.max_deviation, rel(drift_tail(query, DriftDirection::Negative), 4.9395760188312101e-10));
    check.instances = 3;

    // R = 0 must coincide with the plain tail
    DriftQuery zero;
    zero.R = 0.0;
    zero.h = 0.35;
    zero.T = 77.0;
    zero.params = {0.004, 3e-5};
    const double direct = freedman_tail(zero.h, zero.T, zero.params);
    check.max_deviation = std::max(check.max_deviation, std::abs(drift_tail(zero, DriftDirection::Positive) - direct));

    check.passed = check.max_deviation <= 1e-6;
    check.detail = "closed-form tails match direct arithmetic";
    return check;
}

}  // namespace

bool VerifyReport::all_passed() const {
    for (const VerifyCheck& check : checks)
        if (!check.passed) return false;
    return true;
}

VerifyReport run_verification(const std::string& budget) {
    std::int64_t law_n = 6, moment_n = 8;
    int kernel_configs = 1000;
    if (budget == "small") {
        law_n = 5;
        moment_n = 6;
        kernel_configs = 200;
    } else if (budget != "full") {
        throw SpecError("verify: budget must be 'small' or 'full'");
    }

    VerifyReport report;
    report.checks.push_back(check_law_equivalence(law_n, 3));
    report.checks.push_back(check_normalization(law_n, 3));
    report.checks.push_back(check_moments(moment_n, 3));
    report.checks.push_back(check_kernel_stochasticity(kernel_configs));
    report.checks.push_back(check_bernstein_grid());
    report.checks.push_back(check_tail_evaluators());
    return report;
}

}  // namespace odlab
