#pragma once

#include <functional>
#include <vector>

#include "odlab/errors.hpp"

namespace odlab {

/// Sub-exponential increment parameters: jump scale D and variance proxy s.
/// lambda is admissible iff |lambda| * D < 3.
struct BernsteinParams {
    double D = 0.0;
    double s = 0.0;

    bool admissible(double lambda) const;
};

enum class DriftDirection { Positive, Negative };

/// Additive-drift tail query: per-step drift R, displacement h, horizon T.
/// Positive direction needs z = h - R*T > 0; Negative needs R < 0 and
/// z = (-R)*T - h > 0.
struct DriftQuery {
    double R = 0.0;
    double h = 0.0;
    double T = 0.0;
    BernsteinParams params;

    double slack(DriftDirection direction) const;  // throws InvalidSlack
};

/// exp((lambda^2 s / 2) / (1 - |lambda| D / 3)); the MGF envelope of a
/// (D, s)-sub-exponential variable. Throws InadmissibleLambda outside the
/// admissible range.
double bernstein_bound(const BernsteinParams& params, double lambda);
double log_bernstein_bound(const BernsteinParams& params, double lambda);

/// exp(-(h^2/2) / (T s + h D / 3)): probability that a supermartingale with
/// (D, s) increments climbs by h anywhere in T rounds. Computed in log space
/// so extreme parameters underflow to 0 rather than NaN.
double freedman_tail(double h, double T, const BernsteinParams& params);

/// Tail of the additive drift bound; Positive bounds the chance of climbing
/// by h against drift R >= 0 within T, Negative bounds the chance of NOT
/// falling by h despite drift R < 0.
double drift_tail(const DriftQuery& query, DriftDirection direction);

struct BernsteinViolation {
    double lambda = 0.0;
    double mgf = 0.0;
    double bound = 0.0;
};

struct BernsteinReport {
    std::vector<BernsteinViolation> violations;

    bool ok() const { return violations.empty(); }
};

/// Compares an MGF against the Bernstein envelope on a grid of admissible
/// lambda; a violation must exceed 1e-12 absolute slack to count.
BernsteinReport check_bernstein(const std::function<double(double)>& mgf,
                                const BernsteinParams& params,
                                const std::vector<double>& grid);

}  // namespace odlab
