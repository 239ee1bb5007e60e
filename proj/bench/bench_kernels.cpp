// Serial reference vs OpenMP kernels: twist map and QPD grid.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "twistlab/kernels.hpp"
#include "twistlab/observables.hpp"
#include "twistlab/spin_core.hpp"

namespace {

template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace twistlab;
    const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
    std::printf("threads: %d\n", kernels::max_threads());
    std::printf("%-10s %8s %12s %12s %8s\n", "kernel", "2S", "serial_s", "parallel_s", "speedup");

    for (int two_s : {200, 1000, 4000}) {
        const SpinMagnitude spin(two_s);
        const SpinDensityMatrix rho = make_css_x(spin);
        std::vector<Complex> out(rho.elements().size());
        const double ts = best_of(reps, [&] { kernels::twist_map_serial(spin, 0.01, 0.01, rho.elements(), out); });
        const double tp = best_of(reps, [&] { kernels::twist_map_parallel(spin, 0.01, 0.01, rho.elements(), out); });
        std::printf("%-10s %8d %12.6f %12.6f %8.2f\n", "twist_map", two_s, ts, tp, ts / tp);
    }

    for (int two_s : {40, 200}) {
        const SpinMagnitude spin(two_s);
        const SpinDensityMatrix rho = make_css_x(spin);
        const auto grid = uniform_qpd_grid(64, 128);
        const double ts = best_of(reps, [&] { kernels::qpd_serial(rho, grid.theta_samples, grid.phi_samples); });
        const double tp = best_of(reps, [&] { kernels::qpd_parallel(rho, grid.theta_samples, grid.phi_samples); });
        std::printf("%-10s %8d %12.6f %12.6f %8.2f\n", "qpd", two_s, ts, tp, ts / tp);
    }
    return 0;
}
