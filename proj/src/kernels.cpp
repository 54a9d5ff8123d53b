// SPDX-License-Identifier: Apache-2.0

#include "pace/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace pace::kern {

#if defined(PACE_HAVE_AVX2_TU)
const Kernels* avx2_kernels(); // defined in kernels_avx2.cpp
#endif

namespace {

cplx cdotu_scalar(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br - ai * bi;
        im += ar * bi + ai * br;
    }
    return {re, im};
}

double sum_abs2_scalar(const cplx* z, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
    return acc;
}

double dist2_scalar(const cplx* y, const cplx* z, cplx s, std::size_t n) {
    double acc = 0.0;
    const double sr = s.real(), si = s.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double zr = z[i].real(), zi = z[i].imag();
        const double dr = y[i].real() - (sr * zr - si * zi);
        const double di = y[i].imag() - (sr * zi + si * zr);
        acc += dr * dr + di * di;
    }
    return acc;
}

double dist2_mul_scalar(const cplx* y, const cplx* p, const cplx* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pr = p[i].real(), pi = p[i].imag();
        const double xr = x[i].real(), xi = x[i].imag();
        const double dr = y[i].real() - (pr * xr - pi * xi);
        const double di = y[i].imag() - (pr * xi + pi * xr);
        acc += dr * dr + di * di;
    }
    return acc;
}

void shape_mul_scalar(cplx* dst, const double* w, const cplx* g, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        dst[i] = w[i] * g[i];
}

const Kernels scalar_kernels = {
    "scalar", cdotu_scalar, sum_abs2_scalar, dist2_scalar, dist2_mul_scalar, shape_mul_scalar,
};

std::atomic<const Kernels*> g_active{nullptr};

const Kernels* detect() {
    if (const char* env = std::getenv("PACE_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") return &scalar_kernels;
#if defined(PACE_HAVE_AVX2_TU)
        if (want == "avx2" && cpu_has_avx2()) return avx2_kernels();
#endif
    }
#if defined(PACE_HAVE_AVX2_TU)
    if (cpu_has_avx2()) return avx2_kernels();
#endif
    return &scalar_kernels;
}

} // namespace

const Kernels& scalar() { return scalar_kernels; }

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#else
bool cpu_has_avx2() { return false; }
#endif

const Kernels& active() {
    const Kernels* k = g_active.load(std::memory_order_acquire);
    if (!k) {
        k = detect();
        g_active.store(k, std::memory_order_release);
    }
    return *k;
}

bool select(std::string_view name) {
    if (name == "scalar") {
        g_active.store(&scalar_kernels, std::memory_order_release);
        return true;
    }
#if defined(PACE_HAVE_AVX2_TU)
    if (name == "avx2" && cpu_has_avx2()) {
        g_active.store(avx2_kernels(), std::memory_order_release);
        return true;
    }
#endif
    if (name == "auto") {
        g_active.store(detect(), std::memory_order_release);
        return true;
    }
    return false;
}

const char* active_name() { return active().name; }

} // namespace pace::kern
