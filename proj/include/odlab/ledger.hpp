#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "odlab/observables.hpp"

namespace odlab {

using HitTime = std::optional<std::int64_t>;  // empty = not hit yet

/// First-hitting times of the stopping events, measured against baselines
/// captured at construction. Feed rounds in strictly increasing order
/// (round 0 included, so events already true initially fire at 0). A hit,
/// once recorded, never changes. Restart arguments are expressed by building
/// a fresh ledger, not by re-baselining this one.
class StoppingLedger {
  public:
    StoppingLedger(const Configuration& initial,
                   const ThresholdConfig& thresholds,
                   std::optional<std::pair<int, int>> tracked_pair = std::nullopt);

    /// Synthetic baselines, for driving the ledger from hand-built records.
    StoppingLedger(std::vector<double> alpha0,
                   double gamma0,
                   std::optional<std::pair<int, int>> tracked_pair,
                   double delta0,
                   double eta0);

    /// Throws OutOfOrderRound unless record.t exceeds every round fed so far.
    void update(const RoundRecord& record, const ThresholdConfig& thresholds);

    // Per-opinion events.
    HitTime tau_up(int i) const { return tau_up_.at(i); }
    HitTime tau_down(int i) const { return tau_down_.at(i); }
    HitTime tau_weak(int i) const { return tau_weak_.at(i); }
    HitTime tau_active(int i) const { return tau_active_.at(i); }
    HitTime tau_vanish(int i) const { return tau_vanish_.at(i); }

    // Tracked-pair and norm events.
    HitTime tau_up_delta() const { return tau_up_delta_; }
    HitTime tau_down_delta() const { return tau_down_delta_; }
    HitTime tau_plus_delta() const { return tau_plus_delta_; }
    HitTime tau_up_gamma() const { return tau_up_gamma_; }
    HitTime tau_down_gamma() const { return tau_down_gamma_; }
    HitTime tau_plus_gamma() const { return tau_plus_gamma_; }
    HitTime tau_plus_eta() const { return tau_plus_eta_; }

    double alpha0(int i) const { return alpha0_.at(i); }
    double gamma0() const { return gamma0_; }
    double delta0() const { return delta0_; }

    int k() const { return static_cast<int>(alpha0_.size()); }

  private:
    std::vector<double> alpha0_;
    double gamma0_ = 0.0;
    std::optional<std::pair<int, int>> tracked_;
    double delta0_ = 0.0;
    double eta0_ = 0.0;

    std::int64_t last_round_ = -1;

    std::vector<HitTime> tau_up_, tau_down_, tau_weak_, tau_active_, tau_vanish_;
    HitTime tau_up_delta_, tau_down_delta_, tau_plus_delta_;
    HitTime tau_up_gamma_, tau_down_gamma_, tau_plus_gamma_;
    HitTime tau_plus_eta_;
};

}  // namespace odlab
