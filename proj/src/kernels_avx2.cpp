// AVX2 backends for the level-1 complex kernels. This translation unit is
// compiled with -mavx2 -mfma and must only be entered after a cpuid check.
#include "mixgraph/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <immintrin.h>

namespace mixgraph::kern {

namespace {

// two complex doubles per __m256d, interleaved (re0, im0, re1, im1)

double a_real_sumsq(const cplx* a, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(p + 2 * i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    alignas(32) double buf[4];
    _mm256_store_pd(buf, acc);
    double out = buf[0] + buf[1] + buf[2] + buf[3];
    for (; i < n; ++i)
        out += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return out;
}

double a_wsumsq(const double* w, const cplx* a, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(p + 2 * i);
        __m256d vw = _mm256_set_pd(w[i + 1], w[i + 1], w[i], w[i]);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(v, vw), v, acc);
    }
    alignas(32) double buf[4];
    _mm256_store_pd(buf, acc);
    double out = buf[0] + buf[1] + buf[2] + buf[3];
    for (; i < n; ++i)
        out += w[i] * (a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
    return out;
}

// (ar+i ai)(br+i bi): re = ar br - ai bi, im = ar bi + ai br
cplx a_cdotu(const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d accre = _mm256_setzero_pd(), accim = _mm256_setzero_pd();
    const __m256d sgn = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d va = _mm256_loadu_pd(pa + 2 * i);
        __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        __m256d vbs = _mm256_permute_pd(vb, 0x5); // (bi0, br0, bi1, br1)
        accre = _mm256_fmadd_pd(_mm256_mul_pd(va, sgn), vb, accre);
        accim = _mm256_fmadd_pd(va, vbs, accim);
    }
    alignas(32) double bre[4], bim[4];
    _mm256_store_pd(bre, accre);
    _mm256_store_pd(bim, accim);
    double re = bre[0] + bre[1] + bre[2] + bre[3];
    double im = bim[0] + bim[1] + bim[2] + bim[3];
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    return {re, im};
}

// conj(a)b: re = ar br + ai bi, im = ar bi - ai br
cplx a_cdotc(const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d accre = _mm256_setzero_pd(), accim = _mm256_setzero_pd();
    const __m256d sgn = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d va = _mm256_loadu_pd(pa + 2 * i);
        __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        __m256d vbs = _mm256_permute_pd(vb, 0x5);
        accre = _mm256_fmadd_pd(va, vb, accre);
        accim = _mm256_fmadd_pd(_mm256_mul_pd(va, sgn), vbs, accim);
    }
    alignas(32) double bre[4], bim[4];
    _mm256_store_pd(bre, accre);
    _mm256_store_pd(bim, accim);
    double re = bre[0] + bre[1] + bre[2] + bre[3];
    double im = bim[0] + bim[1] + bim[2] + bim[3];
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void a_caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double* px = reinterpret_cast<const double*>(x);
    double* py = reinterpret_cast<double*>(y);
    const __m256d vre = _mm256_set1_pd(alpha.real());
    const __m256d vim = _mm256_set_pd(alpha.imag(), -alpha.imag(), alpha.imag(), -alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d vx = _mm256_loadu_pd(px + 2 * i);
        __m256d vy = _mm256_loadu_pd(py + 2 * i);
        vy = _mm256_fmadd_pd(vre, vx, vy);
        vy = _mm256_fmadd_pd(vim, _mm256_permute_pd(vx, 0x5), vy);
        _mm256_storeu_pd(py + 2 * i, vy);
    }
    const double ar = alpha.real(), ai = alpha.imag();
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] += cplx(ar * xr - ai * xi, ar * xi + ai * xr);
    }
}

void a_cscale(cplx alpha, cplx* x, std::size_t n) {
    double* px = reinterpret_cast<double*>(x);
    const __m256d vre = _mm256_set1_pd(alpha.real());
    const __m256d vim = _mm256_set_pd(alpha.imag(), -alpha.imag(), alpha.imag(), -alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d vx = _mm256_loadu_pd(px + 2 * i);
        __m256d r = _mm256_mul_pd(vre, vx);
        r = _mm256_fmadd_pd(vim, _mm256_permute_pd(vx, 0x5), r);
        _mm256_storeu_pd(px + 2 * i, r);
    }
    const double ar = alpha.real(), ai = alpha.imag();
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        x[i] = cplx(ar * xr - ai * xi, ar * xi + ai * xr);
    }
}

double a_max_abs(const cplx* a, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(a);
    __m256d vmax = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(p + 2 * i);
        __m256d sq = _mm256_mul_pd(v, v);
        // |z|^2 per lane pair: (re^2+im^2, ., re^2+im^2, .)
        __m256d sum = _mm256_hadd_pd(sq, sq);
        vmax = _mm256_max_pd(vmax, sum);
    }
    alignas(32) double buf[4];
    _mm256_store_pd(buf, vmax);
    double m = std::max(std::max(buf[0], buf[1]), std::max(buf[2], buf[3]));
    for (; i < n; ++i)
        m = std::max(m, a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
    return std::sqrt(m);
}

double a_max_abs_imag(const cplx* a, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(a);
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d vmax = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_and_pd(_mm256_loadu_pd(p + 2 * i), absmask);
        // keep only imag lanes (odd positions)
        __m256d im = _mm256_permute_pd(v, 0x5);
        vmax = _mm256_max_pd(vmax, _mm256_blend_pd(v, im, 0x5));
    }
    alignas(32) double buf[4];
    _mm256_store_pd(buf, vmax);
    double m = std::max(std::max(buf[0], buf[1]), std::max(buf[2], buf[3]));
    for (; i < n; ++i)
        m = std::max(m, std::abs(a[i].imag()));
    return m;
}

constexpr Ops k_avx2 = {
    "avx2",
    a_real_sumsq, a_wsumsq, a_cdotu, a_cdotc,
    a_caxpy, a_cscale, a_max_abs, a_max_abs_imag,
};

} // namespace

const Ops& detail_avx2_ops() { return k_avx2; }

} // namespace mixgraph::kern
