#include "mixgraph/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <string>

#if defined(__aarch64__) || defined(_M_ARM64)
#define GRAPHMIX_ARM64 1
#include <arm_neon.h>
#else
#define GRAPHMIX_ARM64 0
#endif

namespace mixgraph::kern {

#if defined(GRAPHMIX_HAVE_AVX2_TU)
const Ops& detail_avx2_ops(); // defined in the -mavx2 translation unit
#endif

namespace {

double s_real_sumsq(const cplx* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return acc;
}

double s_wsumsq(const double* w, const cplx* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += w[i] * (a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
    return acc;
}

cplx s_cdotu(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    return {re, im};
}

cplx s_cdotc(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void s_caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double ar = alpha.real(), ai = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] += cplx(ar * xr - ai * xi, ar * xi + ai * xr);
    }
}

void s_cscale(cplx alpha, cplx* x, std::size_t n) {
    const double ar = alpha.real(), ai = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        x[i] = cplx(ar * xr - ai * xi, ar * xi + ai * xr);
    }
}

double s_max_abs(const cplx* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
    return std::sqrt(m);
}

double s_max_abs_imag(const cplx* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, std::abs(a[i].imag()));
    return m;
}

constexpr Ops k_scalar = {
    "scalar",
    s_real_sumsq, s_wsumsq, s_cdotu, s_cdotc,
    s_caxpy, s_cscale, s_max_abs, s_max_abs_imag,
};

#if GRAPHMIX_ARM64

// one complex double per 128-bit register
double n_real_sumsq(const cplx* a, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(a);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t v = vld1q_f64(p + 2 * i);
        acc = vfmaq_f64(acc, v, v);
    }
    return vaddvq_f64(acc);
}

double n_wsumsq(const double* w, const cplx* a, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(a);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t v = vld1q_f64(p + 2 * i);
        acc = vfmaq_f64(acc, vmulq_n_f64(v, w[i]), v);
    }
    return vaddvq_f64(acc);
}

cplx n_cdotu(const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    float64x2_t accre = vdupq_n_f64(0.0), accim = vdupq_n_f64(0.0);
    const float64x2_t sgn = {1.0, -1.0};
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t va = vld1q_f64(pa + 2 * i);
        float64x2_t vb = vld1q_f64(pb + 2 * i);
        accre = vfmaq_f64(accre, vmulq_f64(va, sgn), vb);        // ar*br, -ai*bi
        accim = vfmaq_f64(accim, va, vextq_f64(vb, vb, 1));      // ar*bi, ai*br
    }
    return {vaddvq_f64(accre), vaddvq_f64(accim)};
}

cplx n_cdotc(const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    float64x2_t accre = vdupq_n_f64(0.0), accim = vdupq_n_f64(0.0);
    const float64x2_t sgn = {1.0, -1.0};
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t va = vld1q_f64(pa + 2 * i);
        float64x2_t vb = vld1q_f64(pb + 2 * i);
        accre = vfmaq_f64(accre, va, vb);                         // ar*br, ai*bi
        accim = vfmaq_f64(accim, vmulq_f64(va, sgn), vextq_f64(vb, vb, 1)); // ar*bi, -ai*br
    }
    return {vaddvq_f64(accre), vaddvq_f64(accim)};
}

void n_caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double* px = reinterpret_cast<const double*>(x);
    double* py = reinterpret_cast<double*>(y);
    const float64x2_t vre = vdupq_n_f64(alpha.real());
    const float64x2_t vim = {-alpha.imag(), alpha.imag()};
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t vx = vld1q_f64(px + 2 * i);
        float64x2_t vy = vld1q_f64(py + 2 * i);
        vy = vfmaq_f64(vy, vre, vx);
        vy = vfmaq_f64(vy, vim, vextq_f64(vx, vx, 1));
        vst1q_f64(py + 2 * i, vy);
    }
}

void n_cscale(cplx alpha, cplx* x, std::size_t n) {
    double* px = reinterpret_cast<double*>(x);
    const float64x2_t vre = vdupq_n_f64(alpha.real());
    const float64x2_t vim = {-alpha.imag(), alpha.imag()};
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t vx = vld1q_f64(px + 2 * i);
        float64x2_t r = vmulq_f64(vre, vx);
        r = vfmaq_f64(r, vim, vextq_f64(vx, vx, 1));
        vst1q_f64(px + 2 * i, r);
    }
}

double n_max_abs(const cplx* a, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(a);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t v = vld1q_f64(p + 2 * i);
        m = std::max(m, vaddvq_f64(vmulq_f64(v, v)));
    }
    return std::sqrt(m);
}

double n_max_abs_imag(const cplx* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, std::abs(a[i].imag()));
    return m;
}

constexpr Ops k_neon = {
    "neon",
    n_real_sumsq, n_wsumsq, n_cdotu, n_cdotc,
    n_caxpy, n_cscale, n_max_abs, n_max_abs_imag,
};

#endif // GRAPHMIX_ARM64

std::atomic<const Ops*> g_active{nullptr};

const Ops* select_backend() {
#if defined(GRAPHMIX_HAVE_AVX2_TU)
    if (__builtin_cpu_supports("avx2")) return &detail_avx2_ops();
#endif
#if GRAPHMIX_ARM64
    return &k_neon;
#endif
    return &k_scalar;
}

} // namespace

const Ops& scalar_ops() { return k_scalar; }

const Ops& active() {
    const Ops* p = g_active.load(std::memory_order_acquire);
    if (!p) {
        p = select_backend();
        g_active.store(p, std::memory_order_release);
    }
    return *p;
}

const char* active_impl() { return active().name; }

bool force_impl(const char* name) {
    if (std::strcmp(name, "scalar") == 0) { g_active.store(&k_scalar); return true; }
#if defined(GRAPHMIX_HAVE_AVX2_TU)
    if (std::strcmp(name, "avx2") == 0 && __builtin_cpu_supports("avx2")) {
        g_active.store(&detail_avx2_ops());
        return true;
    }
#endif
#if GRAPHMIX_ARM64
    if (std::strcmp(name, "neon") == 0) { g_active.store(&k_neon); return true; }
#endif
    return false;
}

} // namespace mixgraph::kern
