#include "odlab/rng.hpp"

#include "odlab/errors.hpp"

namespace odlab {

std::uint64_t RandomStream::mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RandomStream RandomStream::derive(std::uint64_t seed,
                                  std::uint64_t a,
                                  std::uint64_t b,
                                  std::uint64_t c,
                                  std::string_view purpose) {
    std::uint64_t h = mix(seed);
    h = mix(h ^ a);
    h = mix(h ^ b);
    h = mix(h ^ c);
    for (unsigned char ch : purpose) h = mix(h ^ ch);
    return RandomStream(h);
}

std::int64_t RandomStream::uniform_below(std::int64_t bound) {
    if (bound < 1) throw SpecError("uniform_below: bound must be >= 1");
    const std::uint64_t range = static_cast<std::uint64_t>(bound);
    // rejection to keep the draw unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t value;
    do {
        value = engine_();
    } while (value >= limit);
    return static_cast<std::int64_t>(value % range);
}

double RandomStream::uniform01() {
    return (engine_() >> 11) * 0x1.0p-53;
}

std::int64_t RandomStream::binomial(std::int64_t trials, double p) {
    if (trials < 0) throw SpecError("binomial: negative trial count");
    if (trials == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    std::binomial_distribution<std::int64_t> dist(trials, p);
    return dist(engine_);
}

}  // namespace odlab
