#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "odlab/config.hpp"

namespace odlab {

/// Exact distribution over next-round count vectors of a small instance.
struct CountDistribution {
    std::int64_t n = 0;
    int k = 0;
    std::map<std::vector<std::int64_t>, double> pmf;

    double total_mass() const;
};

// Enumeration budget: beyond this the ops throw BudgetExceeded.
inline constexpr std::int64_t kOracleMaxN = 12;
inline constexpr int kOracleMaxK = 4;

/// Ground-truth one-step law of the per-vertex process. The per-vertex
/// destination distribution is enumerated directly from the sampling rule
/// (all ordered neighbor triples resp. pairs), then the count law is built
/// by convolving vertices one at a time. Independent of the closed-form
/// kernels and of the fast-sampler decomposition.
CountDistribution enumerate_step_pmf(const Configuration& config, ProtocolKind protocol);

/// The law the fast stepper actually samples from: sequential conditional
/// binomials over the closed-form kernel (Sync3Majority), or per-origin
/// switcher binomial plus destination split, convolved over origins
/// (Sync2Choices). Equality with enumerate_step_pmf is the flagship check.
CountDistribution fast_target_pmf(const Configuration& config, ProtocolKind protocol);

/// (1/2) sum |p - q| over the union of supports; requires matching (n, k).
double tv_distance(const CountDistribution& p, const CountDistribution& q);

struct ExactMoments {
    std::vector<double> e_alpha;
    std::vector<double> var_alpha;
    double e_gamma = 0.0;
    // second_moment[i][j] = E[a'_i a'_j]
    std::vector<std::vector<double>> second_moment;

    double delta_mean(int i, int j) const;
    double delta_var(int i, int j) const;
};

/// One-step moments from the enumerated law.
ExactMoments exact_moments(const Configuration& config, ProtocolKind protocol);

/// Exact MGF of a'(i) - E[a'(i)] under Sync3Majority, where n*a'(i) is
/// binomial with the kernel destination probability. Throws MgfOverflow when
/// the value leaves the double range instead of saturating.
double exact_mgf_alpha_3maj(const Configuration& config, int opinion, double lambda);

}  // namespace odlab
