#include "odlab/ledger.hpp"

#include <cmath>

#include "odlab/errors.hpp"
#include "odlab/kernel.hpp"

namespace odlab {

namespace {

void fire(HitTime& slot, std::int64_t t, bool condition) {
    if (!slot && condition) slot = t;
}

}  // namespace

StoppingLedger::StoppingLedger(const Configuration& initial,
                               const ThresholdConfig& thresholds,
                               std::optional<std::pair<int, int>> tracked_pair)
    : alpha0_(fractions(initial)), gamma0_(squared_norm(initial)), tracked_(tracked_pair) {
    thresholds.validate();
    if (tracked_) {
        const auto [i, j] = *tracked_;
        if (i < 0 || j < 0 || i >= k() || j >= k() || i == j)
            throw SpecError("ledger: tracked pair must name two distinct opinions below k");
        delta0_ = alpha0_[i] - alpha0_[j];
        const double larger = std::max(alpha0_[i], alpha0_[j]);
        eta0_ = larger > 0.0 ? delta0_ / std::sqrt(larger) : 0.0;
    }
    tau_up_.assign(alpha0_.size(), std::nullopt);
    tau_down_.assign(alpha0_.size(), std::nullopt);
    tau_weak_.assign(alpha0_.size(), std::nullopt);
    tau_active_.assign(alpha0_.size(), std::nullopt);
    tau_vanish_.assign(alpha0_.size(), std::nullopt);
}

StoppingLedger::StoppingLedger(std::vector<double> alpha0,
                               double gamma0,
                               std::optional<std::pair<int, int>> tracked_pair,
                               double delta0,
                               double eta0)
    : alpha0_(std::move(alpha0)), gamma0_(gamma0), tracked_(tracked_pair), delta0_(delta0), eta0_(eta0) {
    tau_up_.assign(alpha0_.size(), std::nullopt);
    tau_down_.assign(alpha0_.size(), std::nullopt);
    tau_weak_.assign(alpha0_.size(), std::nullopt);
    tau_active_.assign(alpha0_.size(), std::nullopt);
    tau_vanish_.assign(alpha0_.size(), std::nullopt);
}

void StoppingLedger::update(const RoundRecord& record, const ThresholdConfig& thresholds) {
    if (record.t <= last_round_)
        throw OutOfOrderRound("ledger: round " + std::to_string(record.t) + " after round " + std::to_string(last_round_));
    if (static_cast<int>(record.alpha.size()) != k())
        throw ShapeMismatch("ledger: record has " + std::to_string(record.alpha.size()) + " opinions, expected " + std::to_string(k()));
    last_round_ = record.t;
    const std::int64_t t = record.t;

    const double active_level = (1.0 - thresholds.c_active) * gamma0_;
    for (int i = 0; i < k(); ++i) {
        fire(tau_up_[i], t, record.alpha[i] >= (1.0 + thresholds.c_up_alpha) * alpha0_[i]);
        fire(tau_down_[i], t, record.alpha[i] <= (1.0 - thresholds.c_down_alpha) * alpha0_[i]);
        fire(tau_weak_[i], t, record.weak[i]);
        fire(tau_active_[i], t, record.alpha[i] >= active_level);
        fire(tau_vanish_[i], t, record.alpha[i] == 0.0);
    }

    fire(tau_up_gamma_, t, record.gamma >= (1.0 + thresholds.c_up_gamma) * gamma0_);
    fire(tau_down_gamma_, t, record.gamma <= (1.0 - thresholds.c_down_gamma) * gamma0_);
    fire(tau_plus_gamma_, t, record.gamma >= thresholds.x_gamma);

    if (tracked_ && record.tracked) {
        const TrackedBias& bias = *record.tracked;
        fire(tau_up_delta_, t, bias.delta >= (1.0 + thresholds.c_up_delta) * delta0_);
        fire(tau_down_delta_, t, bias.delta <= (1.0 - thresholds.c_down_delta) * delta0_);
        fire(tau_plus_delta_, t, std::abs(bias.delta) >= thresholds.x_delta);
        fire(tau_plus_eta_, t, std::abs(bias.eta) >= thresholds.x_eta);
    }
}

}  // namespace odlab
