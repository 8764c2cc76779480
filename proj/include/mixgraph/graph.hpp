#pragma once
// Metric graph data model: edges carrying either diffusion (u_t = u_xx) or
// one-way transport (u_t = -u_x, flow 0 -> a) dynamics, per-edge grids,
// quadrature, and the trace/co-trace maps into the boundary space
// H = C^{2D+T} with fixed block order (d+, d-, t).

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mixgraph {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

struct MetricGraph {
    std::vector<double> diffusion_lengths;
    std::vector<double> transport_lengths;
    // optional vertex data: per edge (tail, head) = (e(0), e(a)), diffusion edges first
    std::optional<std::vector<std::pair<int, int>>> endpoints;
    int num_vertices = 0;

    int D() const { return static_cast<int>(diffusion_lengths.size()); }
    int T() const { return static_cast<int>(transport_lengths.size()); }
    int edges() const { return D() + T(); }
    int boundary_dim() const { return 2 * D() + T(); }
    double length(int e) const {
        return e < D() ? diffusion_lengths[e] : transport_lengths[e - D()];
    }
    bool is_transport(int e) const { return e >= D(); }
    void check() const; // throws on invariant violation
};

struct Grids {
    std::vector<int> n; // intervals per edge, n_e >= 4
    static Grids uniform(const MetricGraph& g, int n_per_edge);
};

struct Incidence {
    Eigen::MatrixXi iplus, iminus, I;
};

// requires vertex data; throws "no-incidence-info"
Incidence incidence_matrices(const MetricGraph& g);

struct EdgeFunction {
    std::vector<Vec> values;          // node values on [0, a_e], n_e+1 nodes
    std::vector<double> lengths;
    std::vector<bool> transport;

    int edges() const { return static_cast<int>(values.size()); }
    int n(int e) const { return static_cast<int>(values[e].size()) - 1; }
    double h(int e) const { return lengths[e] / n(e); }
    double x(int e, int i) const { return lengths[e] * i / n(e); }
    int total_nodes() const;

    static EdgeFunction zeros(const MetricGraph& g, const Grids& grids);
    // flat layout: edge-major, diffusion edges first
    Vec flat() const;
    void set_flat(const Vec& v);
};

// trapezoid weights in the flat layout
Eigen::VectorXd quad_weights(const EdgeFunction& u);

struct BoundaryVector {
    Vec v; // (d+, d-, t)
};

// endpoint values: (u_d(a), u_d(0), 2^{-1/2}(u_t(a)+u_t(0)))
BoundaryVector trace(const EdgeFunction& u);
// endpoint fluxes: (u_d'(a), -u_d'(0), 2^{-1/2}(-u_t(a)+u_t(0))),
// derivatives by one-sided second-order stencils; throws "stencil-underflow"
BoundaryVector cotrace(const EdgeFunction& u);
// trace/cotrace pair for adjoint-domain functions: J = diag(1_{2D}, -1_T)
BoundaryVector adjoint_trace(const EdgeFunction& v);
BoundaryVector adjoint_cotrace(const EdgeFunction& v);

struct Norms {
    double l2, h1, sup;
};
Norms norms(const EdgeFunction& u);
double l2_norm(const EdgeFunction& u);

struct TraceIneqReport {
    double lhs, rhs;    // of the worst node
    double worst_ratio; // lhs/rhs
    bool ok;
};
// node-wise |u(y)|^2 <= C_e ||u|| ||u||_{H1} per edge, C_e = 2*sqrt(2)*max(1, 1/a_e)
TraceIneqReport trace_inequality_check(const EdgeFunction& u);

// graph-level constant for the trace estimate ||u-bar||^2 <= C ||u|| ||u||_{H1}:
// per-edge constants aggregated over both endpoints of every edge
double trace_constant(const MetricGraph& g);

} // namespace mixgraph
