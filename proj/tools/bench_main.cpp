// Timing comparison of the OpenMP kernels against their serial
// reference implementations, with agreement checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "smallball/nystrom.hpp"
#include "smallball/process.hpp"
#include "smallball/smallball.hpp"
#include "smallball/threading.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& f, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        f();
        const auto t1 = Clock::now();
        best = std::min(best,
                        std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const std::string& name, double serial_ms, double parallel_ms,
         const std::string& agreement) {
    std::printf("%-34s %10.1f ms %10.1f ms %8.2fx   %s\n", name.c_str(),
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                agreement.c_str());
}

} // namespace

int main() {
    const int threads = smallball::apply_thread_cap();
    std::printf("smallball benchmark (%d thread%s)\n%-34s %13s %13s %9s   %s\n",
                threads, threads == 1 ? "" : "s", "kernel", "serial",
                "openmp", "speedup", "agreement");

    using namespace smallball;

    {
        const Kernel k = kernel(ProcessSpec::ou(1.0, true));
        const int n = 1200;
        std::vector<double> a, b;
        const double ts = time_ms([&] { a = assemble_nystrom_matrix_serial(k, n); });
        const double tp = time_ms([&] { b = assemble_nystrom_matrix(k, n); });
        double max_diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            max_diff = std::max(max_diff, std::abs(a[i] - b[i]));
        }
        row("nystrom matrix assembly n=1200", ts, tp,
            max_diff == 0.0 ? "bitwise equal"
                            : "max |diff| = " + std::to_string(max_diff));
    }

    {
        const QuadFormDist d = make_quadform(ProcessSpec::ou(1.0, true), 400, 42);
        const double x = 0.04;
        McResult ms, mp;
        const double ts = time_ms([&] { ms = quadform_mc_serial(d, x, 400000); }, 2);
        const double tp = time_ms([&] { mp = quadform_mc(d, x, 400000); }, 2);
        row("monte carlo 4e5 samples, K=400", ts, tp,
            ms.below == mp.below ? "bitwise equal" : "MISMATCH");
    }

    {
        const QuadFormDist d = make_quadform(ProcessSpec::wiener(true), 2000, 0);
        CdfResult cs, cp;
        const double ts = time_ms([&] { cs = quadform_cdf_serial(d, 0.04); }, 2);
        const double tp = time_ms([&] { cp = quadform_cdf(d, 0.04); }, 2);
        const double diff = std::abs(cs.p - cp.p);
        row("imhof inversion K=2000", ts, tp,
            diff == 0.0 ? "bitwise equal" : "|diff| = " + std::to_string(diff));
    }

    return 0;
}
