#include "odlab/config.hpp"

#include <cmath>
#include <numeric>

#include "odlab/errors.hpp"

namespace odlab {

bool is_synchronous(ProtocolKind protocol) {
    return protocol != ProtocolKind::Async3Majority;
}

std::string protocol_name(ProtocolKind protocol) {
    switch (protocol) {
        case ProtocolKind::Sync3Majority: return "3maj";
        case ProtocolKind::Sync2Choices: return "2choices";
        case ProtocolKind::Async3Majority: return "async3maj";
    }
    return "?";
}

ProtocolKind parse_protocol(const std::string& name) {
    if (name == "3maj") return ProtocolKind::Sync3Majority;
    if (name == "2choices") return ProtocolKind::Sync2Choices;
    if (name == "async3maj") return ProtocolKind::Async3Majority;
    throw SpecError("unknown protocol '" + name + "' (expected 3maj, 2choices or async3maj)");
}

void Configuration::validate() const {
    if (n < 1) throw SpecError("configuration: n must be >= 1");
    if (counts.empty()) throw SpecError("configuration: k must be >= 1");
    std::int64_t total = 0;
    for (std::int64_t c : counts) {
        if (c < 0) throw SpecError("configuration: negative opinion count");
        total += c;
    }
    if (total != n) throw SpecError("configuration: counts sum to " + std::to_string(total) + ", expected n = " + std::to_string(n));
}

bool Configuration::is_consensus() const {
    for (std::int64_t c : counts)
        if (c == n) return true;
    return false;
}

std::optional<int> Configuration::winner() const {
    for (int i = 0; i < k(); ++i)
        if (counts[i] == n) return i;
    return std::nullopt;
}

Configuration balanced_config(std::int64_t n, int k) {
    if (k < 1 || n < 1) throw SpecError("balanced init: need n >= 1 and k >= 1");
    Configuration config;
    config.n = n;
    config.counts.assign(k, n / k);
    for (std::int64_t i = 0; i < n % k; ++i) config.counts[i] += 1;
    return config;
}

Configuration singleton_config(std::int64_t n) {
    if (n < 1) throw SpecError("singleton init: need n >= 1");
    Configuration config;
    config.n = n;
    config.counts.assign(n, 1);
    return config;
}

Configuration explicit_config(std::int64_t n, std::vector<std::int64_t> counts) {
    Configuration config;
    config.n = n;
    config.counts = std::move(counts);
    config.validate();
    return config;
}

Configuration planted_bias_config(std::int64_t n, int k, double bias) {
    if (k < 2) throw SpecError("planted bias init: need k >= 2");
    if (bias < 0.0 || bias >= 1.0) throw SpecError("planted bias init: bias must be in [0, 1)");
    const double top = 1.0 / k + bias * (k - 1) / k;
    const double rest = (1.0 - top) / (k - 1);
    Configuration config;
    config.n = n;
    config.counts.assign(k, 0);
    config.counts[0] = static_cast<std::int64_t>(std::ceil(top * n));
    std::int64_t used = config.counts[0];
    for (int i = 1; i < k - 1; ++i) {
        config.counts[i] = static_cast<std::int64_t>(std::floor(rest * n));
        used += config.counts[i];
    }
    config.counts[k - 1] = n - used;
    config.validate();
    return config;
}

double plurality_bias(ProtocolKind protocol, std::int64_t n, int k, double factor) {
    if (k < 2) throw SpecError("plurality bias: need k >= 2");
    const double log_term = std::log(static_cast<double>(n)) / n;
    if (protocol != ProtocolKind::Sync2Choices) return factor * std::sqrt(log_term);
    // margin scales with sqrt(alpha_1); alpha_1 itself depends on the bias,
    // so resolve the fixed point.
    double bias = factor * std::sqrt(log_term / k);
    for (int iter = 0; iter < 64; ++iter) {
        const double alpha1 = 1.0 / k + bias * (k - 1) / k;
        bias = factor * std::sqrt(alpha1 * log_term);
    }
    return bias;
}

}  // namespace odlab
