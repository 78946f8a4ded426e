#include "odlab/kernel.hpp"

#include "odlab/errors.hpp"

namespace odlab {

std::vector<double> fractions(const Configuration& config) {
    std::vector<double> alpha(config.counts.size());
    const double n = static_cast<double>(config.n);
    for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] = static_cast<double>(config.counts[i]) / n;
    return alpha;
}

double squared_norm(const Configuration& config) {
    const double n = static_cast<double>(config.n);
    double sum = 0.0, comp = 0.0;
    for (std::int64_t c : config.counts) {
        const double a = static_cast<double>(c) / n;
        const double term = a * a - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

StepKernel kernel_3majority(const Configuration& config) {
    config.validate();
    StepKernel kernel;
    kernel.protocol = ProtocolKind::Sync3Majority;
    kernel.gamma = squared_norm(config);
    const auto alpha = fractions(config);
    kernel.dest.resize(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i)
        kernel.dest[i] = alpha[i] * (1.0 + alpha[i] - kernel.gamma);
    return kernel;
}

StepKernel kernel_2choices(const Configuration& config) {
    config.validate();
    StepKernel kernel;
    kernel.protocol = ProtocolKind::Sync2Choices;
    kernel.gamma = squared_norm(config);
    const auto alpha = fractions(config);
    kernel.stay.resize(alpha.size());
    kernel.dest_sq.resize(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        kernel.dest_sq[i] = alpha[i] * alpha[i];
        kernel.stay[i] = 1.0 - kernel.gamma + kernel.dest_sq[i];
    }
    return kernel;
}

double StepKernel::row(int origin, int target) const {
    if (protocol == ProtocolKind::Sync2Choices) {
        if (origin == target) return stay[origin];
        return dest_sq[target];
    }
    return dest[target];
}

}  // namespace odlab
