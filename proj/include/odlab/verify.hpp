#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace odlab {

struct VerifyCheck {
    std::string name;
    std::int64_t instances = 0;
    double max_deviation = 0.0;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;

    bool all_passed() const;
};

/// Exhaustive small-instance oracle suite: law equivalence between the
/// enumerated per-vertex process and the fast-sampler target, moment
/// identities and bounds, kernel stochasticity, the Bernstein MGF grid and
/// the closed-form tail evaluators. budget "small" trims the instance sizes;
/// "full" runs the complete set.
VerifyReport run_verification(const std::string& budget);

}  // namespace odlab
