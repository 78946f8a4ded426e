#pragma once

#include <vector>

#include "odlab/config.hpp"

namespace odlab {

/// Exact one-round transition law derived from a Configuration.
///
/// Sync3Majority: every vertex redraws its opinion from the same destination
/// distribution `dest`, dest[i] = a_i * (1 + a_i - gamma) with a_i the
/// fractional population and gamma = sum a_j^2.
///
/// Sync2Choices: a vertex holding opinion j keeps it with probability
/// stay[j] = 1 - gamma + a_j^2 and moves to i != j with probability
/// dest_sq[i] = a_i^2. Each row {stay[j]} + {dest_sq[i], i != j} sums to 1.
struct StepKernel {
    ProtocolKind protocol;
    double gamma = 0.0;
    std::vector<double> dest;     // Sync3Majority only
    std::vector<double> stay;     // Sync2Choices only
    std::vector<double> dest_sq;  // Sync2Choices only

    int k() const { return static_cast<int>(protocol == ProtocolKind::Sync2Choices ? stay.size() : dest.size()); }

    /// Probability that a vertex currently holding `origin` ends at `target`.
    double row(int origin, int target) const;
};

StepKernel kernel_3majority(const Configuration& config);
StepKernel kernel_2choices(const Configuration& config);

/// Fractional populations counts[i]/n.
std::vector<double> fractions(const Configuration& config);

/// Compensated sum of a_i^2; equals 1/k at the balanced point and 1 at
/// consensus.
double squared_norm(const Configuration& config);

}  // namespace odlab
