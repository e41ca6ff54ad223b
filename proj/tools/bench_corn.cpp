// Times the serial candidate scan against the OpenMP one on the same market
// and checks the outputs are bit-identical while at it.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "corn/market.hpp"
#include "corn/strategy.hpp"

using corn::CornOptions;
using corn::CornRun;
using corn::ExecMode;

namespace {

corn::SyntheticMarketSpec bench_spec() {
    corn::SyntheticMarketSpec spec;
    spec.kind = corn::MarketKind::markov_regime;
    spec.regimes = {
        {corn::Outcome{corn::MarketVector{{1.0, 1.25}}, 0.7},
         corn::Outcome{corn::MarketVector{{1.0, 1.1}}, 0.3}},
        {corn::Outcome{corn::MarketVector{{1.0, 0.8}}, 0.6},
         corn::Outcome{corn::MarketVector{{1.0, 0.9}}, 0.4}},
    };
    spec.transition = {{0.9, 0.1}, {0.2, 0.8}};
    spec.seed = 42;
    return spec;
}

double run_ms(const corn::MarketSequence& seq, const corn::PoolSpec& pool, ExecMode mode,
              CornRun& out) {
    CornOptions opts;
    opts.mode = mode;
    const auto start = std::chrono::steady_clock::now();
    out = corn_run(seq, pool, opts);
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    int n = 4000;
    if (argc > 1) n = std::atoi(argv[1]);
    if (n < 10) {
        std::fprintf(stderr, "usage: %s [periods >= 10]\n", argv[0]);
        return 1;
    }

    const corn::MarketSequence seq = corn::generate(bench_spec(), n);
    const corn::PoolSpec pool{2, 5};

#ifdef _OPENMP
    std::printf("threads            %d\n", omp_get_max_threads());
#else
    std::printf("threads            1 (built without OpenMP)\n");
#endif
    std::printf("periods            %d\n", n);

    CornRun serial, parallel;
    const double ms_serial = run_ms(seq, pool, ExecMode::serial, serial);
    const double ms_parallel = run_ms(seq, pool, ExecMode::parallel, parallel);

    bool identical = serial.mixture.logs == parallel.mixture.logs;
    for (std::size_t e = 0; identical && e < serial.expert_trajectories.size(); ++e) {
        identical = serial.expert_trajectories[e].logs == parallel.expert_trajectories[e].logs;
    }

    std::printf("serial             %.1f ms\n", ms_serial);
    std::printf("parallel           %.1f ms\n", ms_parallel);
    std::printf("speedup            %.2fx\n", ms_serial / ms_parallel);
    std::printf("outputs identical  %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
