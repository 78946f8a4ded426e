#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "odlab/config.hpp"

namespace odlab {

/// Constants for the stopping-time ledger. The relative constants follow the
/// usual convention c_up_alpha = c_down_alpha = c_weak = 1/10,
/// c_up_delta = c_down_delta = c_active = 1/20, c_up_gamma = c_down_gamma =
/// 1/30; the absolute thresholds x_* default to 1 (never fire) and are set
/// per experiment.
struct ThresholdConfig {
    double c_weak = 0.1;
    double c_active = 0.05;
    double c_up_alpha = 0.1;
    double c_down_alpha = 0.1;
    double c_up_delta = 0.05;
    double c_down_delta = 0.05;
    double c_up_gamma = 1.0 / 30.0;
    double c_down_gamma = 1.0 / 30.0;
    double c_up_eta = 0.001;
    double x_delta = 1.0;
    double x_gamma = 1.0;
    double x_eta = 1.0;

    /// Requires c_weak < 1/2 and c_down_gamma < c_active < c_weak.
    void validate() const;
};

struct TrackedBias {
    int i = 0;
    int j = 1;
    double delta = 0.0;  // a_i - a_j
    double eta = 0.0;    // delta / sqrt(max(a_i, a_j)), 0 at an all-zero pair
};

/// Per-round observables.
struct RoundRecord {
    std::int64_t t = 0;
    double gamma = 0.0;
    double max_alpha = 0.0;
    std::int64_t remaining_opinions = 0;
    std::vector<double> alpha;
    std::vector<bool> weak;  // alpha_i <= (1 - c_weak) * gamma
    std::int64_t weak_count = 0;
    std::optional<TrackedBias> tracked;
};

RoundRecord summarize(const Configuration& config,
                      const ThresholdConfig& thresholds,
                      std::int64_t t,
                      std::optional<std::pair<int, int>> tracked_pair = std::nullopt);

}  // namespace odlab
