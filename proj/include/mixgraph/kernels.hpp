#pragma once
// Level-1 complex array kernels with runtime-selected SIMD backends.
// Scalar reference implementations are the ground truth; vector backends
// must agree with them to reassociation tolerance (see tests).

#include <complex>
#include <cstddef>

namespace mixgraph::kern {

using cplx = std::complex<double>;

struct Ops {
    const char* name;
    double (*real_sumsq)(const cplx*, std::size_t);
    double (*wsumsq)(const double*, const cplx*, std::size_t);
    cplx (*cdotu)(const cplx*, const cplx*, std::size_t);
    cplx (*cdotc)(const cplx*, const cplx*, std::size_t);
    void (*caxpy)(cplx, const cplx*, cplx*, std::size_t);
    void (*cscale)(cplx, cplx*, std::size_t);
    double (*max_abs)(const cplx*, std::size_t);
    double (*max_abs_imag)(const cplx*, std::size_t);
};

// active backend, chosen once per process from CPU capabilities
const Ops& active();
const char* active_impl();

// backend override for equivalence testing; returns false if unavailable
bool force_impl(const char* name);

const Ops& scalar_ops();

inline double real_sumsq(const cplx* a, std::size_t n) { return active().real_sumsq(a, n); }
inline double wsumsq(const double* w, const cplx* a, std::size_t n) { return active().wsumsq(w, a, n); }
inline cplx cdotu(const cplx* a, const cplx* b, std::size_t n) { return active().cdotu(a, b, n); }
inline cplx cdotc(const cplx* a, const cplx* b, std::size_t n) { return active().cdotc(a, b, n); }
inline void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) { active().caxpy(alpha, x, y, n); }
inline void cscale(cplx alpha, cplx* x, std::size_t n) { active().cscale(alpha, x, n); }
inline double max_abs(const cplx* a, std::size_t n) { return active().max_abs(a, n); }
inline double max_abs_imag(const cplx* a, std::size_t n) { return active().max_abs_imag(a, n); }

} // namespace mixgraph::kern
