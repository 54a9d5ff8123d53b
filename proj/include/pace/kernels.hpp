// SPDX-License-Identifier: Apache-2.0
//
// Runtime-dispatched arithmetic kernels for the hot inner loops: complex dot
// products (interpolator apply), squared-distance accumulation (NN metric),
// spectral shaping (fading synthesis) and |.|^2 sums. A scalar reference
// implementation is always available; an AVX2/FMA variant is selected at
// runtime when the CPU supports it. Both variants are equivalence-tested.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace pace {

using cplx = std::complex<double>;

namespace kern {

struct Kernels {
    const char* name;
    // sum_i a[i]*b[i]  (no conjugation)
    cplx (*cdotu)(const cplx* a, const cplx* b, std::size_t n);
    // sum_i |z[i]|^2
    double (*sum_abs2)(const cplx* z, std::size_t n);
    // sum_i |y[i] - s*z[i]|^2
    double (*dist2)(const cplx* y, const cplx* z, cplx s, std::size_t n);
    // sum_i |y[i] - p[i]*x[i]|^2
    double (*dist2_mul)(const cplx* y, const cplx* p, const cplx* x, std::size_t n);
    // dst[i] = w[i]*g[i], real weights
    void (*shape_mul)(cplx* dst, const double* w, const cplx* g, std::size_t n);
};

const Kernels& scalar();
const Kernels& active();

// "auto" | "scalar" | "avx2"; returns false if the backend is unavailable.
bool select(std::string_view name);
const char* active_name();
bool cpu_has_avx2();

} // namespace kern

// Convenience wrappers over the active backend.
inline cplx cdotu(std::span<const cplx> a, std::span<const cplx> b) {
    return kern::active().cdotu(a.data(), b.data(), std::min(a.size(), b.size()));
}
inline double sum_abs2(std::span<const cplx> z) {
    return kern::active().sum_abs2(z.data(), z.size());
}
inline double dist2(std::span<const cplx> y, std::span<const cplx> z, cplx s) {
    return kern::active().dist2(y.data(), z.data(), s, std::min(y.size(), z.size()));
}
inline double dist2_mul(std::span<const cplx> y, std::span<const cplx> p, std::span<const cplx> x) {
    return kern::active().dist2_mul(y.data(), p.data(), x.data(), std::min(y.size(), p.size()));
}

} // namespace pace
