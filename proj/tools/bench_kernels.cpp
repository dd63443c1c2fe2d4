// Benchmark of the parallel kernels against their serial references:
//   - grid nearest-neighbour search vs the O(n^2) scan
//   - family-based union_measure vs the serial per-annulus scan
//   - Farey enumeration with 1 thread vs all threads
// Run without arguments; prints one table row per kernel.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cfarey/limitdist.hpp"
#include "cfarey/reference.hpp"

using namespace cfarey;
using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double time_of(F&& fn) {
    const auto t0 = Clock::now();
    fn();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int threads_available() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace

int main() {
    std::printf("kernel benchmark (%d threads available)\n\n", threads_available());
    std::printf("%-34s %12s %12s %8s\n", "kernel", "serial [s]", "parallel [s]", "speedup");

    const RingSpec zi = make_ring(-4);

    {
        const FareySet set = enumerate_farey_height(zi, 16.0);
        std::vector<double> ref;
        GapSample fast;
        const double ts = time_of([&] { ref = reference::nearest_gaps_bruteforce(set, Region::whole()); });
        const double tp = time_of([&] { fast = nearest_gaps(set, Region::whole()); });
        double worst = 0;
        for (std::size_t i = 0; i < ref.size(); ++i)
            worst = std::max(worst, std::abs(ref[i] - fast.rescaledGaps[i]));
        std::printf("%-34s %12.3f %12.3f %7.1fx   (max dev %.1e)\n",
                    "nearest gaps, height 16", ts, tp, ts / tp, worst);
    }

    {
        // partial coverage: the unit-denominator annulus is too thin to cover
        QuadratureConfig cfg;
        cfg.mcGridN = 1024;
        cfg.disableCoverShortcut = true;
        const AnnulusSystem sys = build_annulus_system(zi, 4.0, 0.94);
        MeasureEstimate a, b;
        const double ts = time_of([&] { a = reference::union_measure_serial(sys, cfg); });
        const double tp = time_of([&] { b = union_measure(sys, cfg); });
        std::printf("%-34s %12.3f %12.3f %7.1fx   (dev %lld samples)\n",
                    "union measure, delta=4 s=0.94", ts, tp, ts / tp,
                    static_cast<long long>(std::abs(a.covered - b.covered)));
    }

    {
#ifdef _OPENMP
        const int maxThreads = omp_get_max_threads();
        omp_set_num_threads(1);
        std::int64_t c1 = 0, c2 = 0;
        const double ts = time_of([&] { c1 = count_only(zi, 2.0 * std::log(40.0)); });
        omp_set_num_threads(maxThreads);
        const double tp = time_of([&] { c2 = count_only(zi, 2.0 * std::log(40.0)); });
        std::printf("%-34s %12.3f %12.3f %7.1fx   (counts %lld/%lld)\n",
                    "farey count, height 40", ts, tp, ts / tp, static_cast<long long>(c1),
                    static_cast<long long>(c2));
#else
        std::int64_t c = 0;
        const double ts = time_of([&] { c = count_only(zi, 2.0 * std::log(40.0)); });
        std::printf("%-34s %12.3f %12s      --    (count %lld)\n", "farey count, height 40",
                    ts, "n/a", static_cast<long long>(c));
#endif
    }

    return 0;
}
