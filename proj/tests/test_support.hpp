#pragma once

// Extended-precision kernel evaluations for the finite-difference
// identity checks: fourth derivatives at h ~ 1e-3 sit on the eps/h^4
// roundoff floor in double, so the rows are sampled in long double.
// Each helper is pinned to the library kernel by a consistency test.

#include <cmath>

namespace smallball_test {

inline long double iou_demeaned_ld(long double t, long double s, long double b) {
    const long double eb = std::exp(-b);
    auto kernel = [b](long double t0, long double s0) {
        const long double lo = t0 < s0 ? t0 : s0;
        return (2.0L * b * lo + std::exp(-b * t0) + std::exp(-b * s0) -
                std::exp(-b * std::abs(t0 - s0)) - 1.0L) /
               (2.0L * b * b * b);
    };
    auto row_mean = [b, eb](long double t0) {
        const long double ebt = std::exp(-b * t0);
        const long double ebm = std::exp(-b * (1.0L - t0));
        return (2.0L * b * (t0 - 0.5L * t0 * t0) + ebt + (1.0L - eb) / b -
                (2.0L - ebt - ebm) / b - 1.0L) /
               (2.0L * b * b * b);
    };
    const long double total = (2.0L * b / 3.0L + 2.0L * (1.0L - eb) / b -
                               2.0L * (b - 1.0L + eb) / (b * b) - 1.0L) /
                              (2.0L * b * b * b);
    return kernel(t, s) - row_mean(t) - row_mean(s) + total;
}

} // namespace smallball_test
