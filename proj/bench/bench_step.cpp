// Round-throughput comparison of the per-vertex reference stepper against
// the distribution-exact fast stepper, plus OpenMP trial scaling.

#include <omp.h>

#include <cstdio>
#include <string>
#include <vector>

#include "odlab/config.hpp"
#include "odlab/experiments.hpp"
#include "odlab/rng.hpp"
#include "odlab/step.hpp"

using namespace odlab;

namespace {

double time_rounds(const Configuration& init, ProtocolKind protocol, StepperKind stepper, int rounds) {
    RandomStream rng(12345);
    Configuration config = init;
    const double start = omp_get_wtime();
    for (int r = 0; r < rounds; ++r) {
        config = stepper == StepperKind::Fast ? step_fast(config, protocol, rng) : step_naive(config, protocol, rng);
        if (config.is_consensus()) config = init;
    }
    return (omp_get_wtime() - start) / rounds;
}

}  // namespace

int main() {
    std::printf("stepper round times (k = 64, balanced init)\n");
    std::printf("%10s %12s %14s %14s %10s\n", "n", "protocol", "naive [s]", "fast [s]", "speedup");
    for (const std::int64_t n : {10000L, 100000L, 1000000L}) {
        const Configuration init = balanced_config(n, 64);
        for (const ProtocolKind protocol : {ProtocolKind::Sync3Majority, ProtocolKind::Sync2Choices}) {
            const int naive_rounds = n >= 1000000 ? 3 : 20;
            const double naive = time_rounds(init, protocol, StepperKind::Naive, naive_rounds);
            const double fast = time_rounds(init, protocol, StepperKind::Fast, 200);
            std::printf("%10lld %12s %14.6f %14.6f %9.1fx\n", static_cast<long long>(n),
                        protocol_name(protocol).c_str(), naive, fast, naive / fast);
        }
    }

    std::printf("\nsweep throughput vs threads (3maj, n = 65536, k = 32, 64 trials)\n");
    std::printf("%10s %12s %10s\n", "threads", "wall [s]", "speedup");
    ExperimentSpec spec;
    spec.kind = ExperimentKind::Scaling;
    spec.protocol = ProtocolKind::Sync3Majority;
    spec.n_values = {65536};
    spec.k_values = {32};
    spec.trials = 64;
    spec.seed = 7;
    double base = 0.0;
    for (int threads = 1; threads <= omp_get_max_threads(); threads *= 2) {
        spec.threads = threads;
        const double start = omp_get_wtime();
        run_experiment(spec);
        const double wall = omp_get_wtime() - start;
        if (threads == 1) base = wall;
        std::printf("%10d %12.3f %9.2fx\n", threads, wall, base / wall);
    }
    return 0;
}
