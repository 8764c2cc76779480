#pragma once

#include "mixgraph/secular.hpp"

namespace mixgraph {

// closed-form resolvent data at spectral parameter lambda = -k^2.
// sigma couples the free-space kernel moments to the boundary correction;
// R1/R2 carry the endpoint values and derivatives of the free kernel columns.
struct GreenKernel {
    MetricGraph g;
    BoundaryConditions bc;
    cplx k;
    Mat sigma;
    Mat R1, R2;
    double cond_Z = 0.0;
    double abs_det = 0.0;
    double det_scale = 0.0;
};

// factor the secular matrix at k. throws "lambda-in-spectrum" when det Z(k)
// is negligible against nearby samples, "use zero-mode path" at k = 0.
GreenKernel assemble_kernel(const SecularSystem& sys, cplx k);

// pointwise kernel r(x on edge ex, y on edge ey)
cplx kernel_eval(const GreenKernel& K, int ex, double x, int ey, double y);

// v = (A + k^2)^{-1} u by trapezoid quadrature, O(total nodes)
EdgeFunction apply_resolvent(const GreenKernel& K, const EdgeFunction& u);

} // namespace mixgraph
