// SPDX-License-Identifier: Apache-2.0
//
// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; callers must check kern::cpu_has_avx2() before use.

#include "pace/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace pace::kern {

namespace {

// Two interleaved complex doubles per __m256d: [re0, im0, re1, im1].

inline __m256d cmul(__m256d a, __m256d b) {
    // (ar*br - ai*bi, ar*bi + ai*br)
    const __m256d br = _mm256_movedup_pd(b);         // [br0, br0, br1, br1]
    const __m256d bi = _mm256_permute_pd(b, 0xF);    // [bi0, bi0, bi1, bi1]
    const __m256d as = _mm256_permute_pd(a, 0x5);    // [ai0, ar0, ai1, ar1]
    return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(as, bi));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

cplx cdotu_avx2(const cplx* a, const cplx* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
        const __m256d vb = _mm256_loadu_pd(reinterpret_cast<const double*>(b + i));
        acc = _mm256_add_pd(acc, cmul(va, vb));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double re = lanes[0] + lanes[2];
    double im = lanes[1] + lanes[3];
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br - ai * bi;
        im += ar * bi + ai * br;
    }
    return {re, im};
}

double sum_abs2_avx2(const cplx* z, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(reinterpret_cast<const double*>(z + i));
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double out = hsum(acc);
    for (; i < n; ++i)
        out += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
    return out;
}

double dist2_avx2(const cplx* y, const cplx* z, cplx s, std::size_t n) {
    const __m256d sr = _mm256_set1_pd(s.real());
    const __m256d si = _mm256_set1_pd(s.imag());
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vz = _mm256_loadu_pd(reinterpret_cast<const double*>(z + i));
        const __m256d vy = _mm256_loadu_pd(reinterpret_cast<const double*>(y + i));
        const __m256d zs = _mm256_permute_pd(vz, 0x5);
        const __m256d sz = _mm256_fmaddsub_pd(vz, sr, _mm256_mul_pd(zs, si));
        const __m256d d = _mm256_sub_pd(vy, sz);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double out = hsum(acc);
    const double sre = s.real(), sim = s.imag();
    for (; i < n; ++i) {
        const double zr = z[i].real(), zi = z[i].imag();
        const double dr = y[i].real() - (sre * zr - sim * zi);
        const double di = y[i].imag() - (sre * zi + sim * zr);
        out += dr * dr + di * di;
    }
    return out;
}

double dist2_mul_avx2(const cplx* y, const cplx* p, const cplx* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vp = _mm256_loadu_pd(reinterpret_cast<const double*>(p + i));
        const __m256d vx = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        const __m256d vy = _mm256_loadu_pd(reinterpret_cast<const double*>(y + i));
        const __m256d d = _mm256_sub_pd(vy, cmul(vp, vx));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double out = hsum(acc);
    for (; i < n; ++i) {
        const double pr = p[i].real(), pi = p[i].imag();
        const double xr = x[i].real(), xi = x[i].imag();
        const double dr = y[i].real() - (pr * xr - pi * xi);
        const double di = y[i].imag() - (pr * xi + pi * xr);
        out += dr * dr + di * di;
    }
    return out;
}

void shape_mul_avx2(cplx* dst, const double* w, const cplx* g, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m128d w2 = _mm_loadu_pd(w + i);
        const __m256d wd = _mm256_insertf128_pd(
            _mm256_castpd128_pd256(_mm_unpacklo_pd(w2, w2)), _mm_unpackhi_pd(w2, w2), 1);
        const __m256d vg = _mm256_loadu_pd(reinterpret_cast<const double*>(g + i));
        _mm256_storeu_pd(reinterpret_cast<double*>(dst + i), _mm256_mul_pd(wd, vg));
    }
    for (; i < n; ++i)
        dst[i] = w[i] * g[i];
}

const Kernels avx2_table = {
    "avx2", cdotu_avx2, sum_abs2_avx2, dist2_avx2, dist2_mul_avx2, shape_mul_avx2,
};

} // namespace

const Kernels* avx2_kernels() { return &avx2_table; }

} // namespace pace::kern

#endif // x86_64
