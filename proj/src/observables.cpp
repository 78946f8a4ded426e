#include "odlab/observables.hpp"

#include <cmath>

#include "odlab/errors.hpp"
#include "odlab/kernel.hpp"

namespace odlab {

void ThresholdConfig::validate() const {
    if (!(c_weak >= 0.0 && c_weak < 0.5)) throw SpecError("thresholds: c_weak must lie in [0, 1/2)");
    if (!(c_down_gamma < c_active && c_active < c_weak) && c_weak > 0.0)
        throw SpecError("thresholds: need c_down_gamma < c_active < c_weak");
    for (double x : {x_delta, x_gamma, x_eta})
        if (!(x >= 0.0 && x <= 1.0)) throw SpecError("thresholds: absolute thresholds must lie in [0, 1]");
    for (double c : {c_up_alpha, c_down_alpha, c_up_delta, c_down_delta, c_up_gamma, c_down_gamma, c_up_eta})
        if (!(c > 0.0)) throw SpecError("thresholds: relative constants must be positive");
}

RoundRecord summarize(const Configuration& config,
                      const ThresholdConfig& thresholds,
                      std::int64_t t,
                      std::optional<std::pair<int, int>> tracked_pair) {
    RoundRecord record;
    record.t = t;
    record.alpha = fractions(config);
    record.gamma = squared_norm(config);

    record.weak.assign(record.alpha.size(), false);
    const double weak_threshold = (1.0 - thresholds.c_weak) * record.gamma;
    for (std::size_t i = 0; i < record.alpha.size(); ++i) {
        record.max_alpha = std::max(record.max_alpha, record.alpha[i]);
        if (config.counts[i] > 0) record.remaining_opinions += 1;
        if (record.alpha[i] <= weak_threshold) {
            record.weak[i] = true;
            record.weak_count += 1;
        }
    }

    if (tracked_pair) {
        const auto [i, j] = *tracked_pair;
        if (i < 0 || j < 0 || i >= config.k() || j >= config.k() || i == j)
            throw SpecError("tracked pair must name two distinct opinions below k");
        TrackedBias bias;
        bias.i = i;
        bias.j = j;
        bias.delta = record.alpha[i] - record.alpha[j];
        const double larger = std::max(record.alpha[i], record.alpha[j]);
        bias.eta = larger > 0.0 ? bias.delta / std::sqrt(larger) : 0.0;
        record.tracked = bias;
    }
    return record;
}

}  // namespace odlab
