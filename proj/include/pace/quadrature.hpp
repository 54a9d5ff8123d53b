// SPDX-License-Identifier: Apache-2.0
//
// Composite Simpson quadrature over a breakpoint-partitioned interval.
// Integrands are sampled as f(x, toward) where `toward` is the midpoint of
// the segment being integrated; discontinuous integrands use it to return
// the one-sided limit at segment endpoints (the jump sits exactly on a
// breakpoint, so every segment is smooth inside).

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace pace::quad {

template <class F>
auto simpson_segment(F&& f, double a, double b, int subintervals)
    -> decltype(f(0.0, 0.0)) {
    using R = decltype(f(0.0, 0.0));
    if (subintervals < 2) subintervals = 2;
    if (subintervals % 2) ++subintervals;
    const double h = (b - a) / subintervals;
    const double mid = 0.5 * (a + b);
    R acc = f(a, mid) + f(b, mid);
    for (int i = 1; i < subintervals; ++i) {
        const double x = a + h * i;
        acc += (i % 2 ? 4.0 : 2.0) * f(x, mid);
    }
    return acc * (h / 3.0);
}

// `points` is the sorted breakpoint list; integrates from points.front() to
// points.back(), allocating ~total_subintervals across segments by width.
template <class F>
auto integrate(F&& f, std::span<const double> points, int total_subintervals)
    -> decltype(f(0.0, 0.0)) {
    using R = decltype(f(0.0, 0.0));
    if (points.size() < 2) throw std::invalid_argument("quad::integrate: need >= 2 points");
    const double width = points.back() - points.front();
    if (!(width > 0.0)) throw std::invalid_argument("quad::integrate: empty interval");
    R acc{};
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double a = points[i], b = points[i + 1];
        if (!(b > a)) continue; // collapsed segment
        const int n = static_cast<int>(std::ceil(total_subintervals * (b - a) / width));
        acc += simpson_segment(f, a, b, std::max(2, n));
    }
    return acc;
}

// Deduplicates (within tol) and sorts a breakpoint list clipped to [lo, hi].
std::vector<double> normalize_breakpoints(std::vector<double> pts, double lo, double hi,
                                          double tol = 1e-12);

} // namespace pace::quad
