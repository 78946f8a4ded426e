#include "odlab/bounds.hpp"

#include <cmath>

namespace odlab {

bool BernsteinParams::admissible(double lambda) const {
    return std::abs(lambda) * D < 3.0;
}

double log_bernstein_bound(const BernsteinParams& params, double lambda) {
    if (params.D < 0.0 || params.s < 0.0) throw SpecError("bernstein: D and s must be >= 0");
    if (!params.admissible(lambda))
        throw InadmissibleLambda("bernstein: |lambda| * D = " + std::to_string(std::abs(lambda) * params.D) + " >= 3");
    return (lambda * lambda * params.s / 2.0) / (1.0 - std::abs(lambda) * params.D / 3.0);
}

double bernstein_bound(const BernsteinParams& params, double lambda) {
    return std::exp(log_bernstein_bound(params, lambda));
}

double freedman_tail(double h, double T, const BernsteinParams& params) {
    if (!(h > 0.0)) throw SpecError("freedman_tail: h must be > 0");
    if (!(T > 0.0)) throw SpecError("freedman_tail: T must be > 0");
    if (params.D < 0.0 || params.s < 0.0) throw SpecError("freedman_tail: D and s must be >= 0");
    const double denom = T * params.s + h * params.D / 3.0;
    if (denom <= 0.0) return 0.0;  // zero variance and zero jumps: no excursion
    const double log_tail = -(h * h / 2.0) / denom;
    return std::exp(log_tail);
}

double DriftQuery::slack(DriftDirection direction) const {
    if (!(h > 0.0) || !(T > 0.0)) throw SpecError("drift_tail: h and T must be > 0");
    if (direction == DriftDirection::Positive) {
        const double z = h - R * T;
        if (!(z > 0.0)) throw InvalidSlack("drift_tail: h - R*T must be > 0");
        return z;
    }
    if (!(R < 0.0)) throw InvalidSlack("drift_tail: negative direction needs R < 0");
    const double z = (-R) * T - h;
    if (!(z > 0.0)) throw InvalidSlack("drift_tail: (-R)*T - h must be > 0");
    return z;
}

double drift_tail(const DriftQuery& query, DriftDirection direction) {
    const double z = query.slack(direction);
    return freedman_tail(z, query.T, query.params);
}

BernsteinReport check_bernstein(const std::function<double(double)>& mgf,
                                const BernsteinParams& params,
                                const std::vector<double>& grid) {
    BernsteinReport report;
    for (double lambda : grid) {
        const double log_bound = log_bernstein_bound(params, lambda);  // rejects inadmissible points
        const double bound = std::exp(log_bound);
        const double value = mgf(lambda);
        if (value > bound + 1e-12) report.violations.push_back({lambda, value, bound});
    }
    return report;
}

}  // namespace odlab
