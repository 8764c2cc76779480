#include "mixgraph/graph.hpp"
#include "mixgraph/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixgraph {

void MetricGraph::check() const {
    if (edges() < 1) throw std::runtime_error("bad-dimension");
    for (double a : diffusion_lengths)
        if (!(a > 0.0)) throw std::runtime_error("bad-dimension");
    for (double a : transport_lengths)
        if (!(a > 0.0)) throw std::runtime_error("bad-dimension");
    if (endpoints) {
        if (static_cast<int>(endpoints->size()) != edges())
            throw std::runtime_error("no-incidence-info");
        for (auto [v0, va] : *endpoints)
            if (v0 < 0 || v0 >= num_vertices || va < 0 || va >= num_vertices)
                throw std::runtime_error("no-incidence-info");
    }
}

Grids Grids::uniform(const MetricGraph& g, int n_per_edge) {
    if (n_per_edge < 4) throw std::runtime_error("stencil-underflow");
    Grids gr;
    gr.n.assign(g.edges(), n_per_edge);
    return gr;
}

Incidence incidence_matrices(const MetricGraph& g) {
    if (!g.endpoints || g.num_vertices <= 0)
        throw std::runtime_error("no-incidence-info");
    g.check();
    const int V = g.num_vertices, E = g.edges();
    Incidence inc;
    inc.iplus = Eigen::MatrixXi::Zero(V, E);
    inc.iminus = Eigen::MatrixXi::Zero(V, E);
    for (int e = 0; e < E; ++e) {
        auto [v0, va] = (*g.endpoints)[e];
        inc.iplus(va, e) = 1;  // edge ends at e(a)
        inc.iminus(v0, e) = 1; // edge starts at e(0)
    }
    inc.I = inc.iplus - inc.iminus;
    return inc;
}

int EdgeFunction::total_nodes() const {
    int s = 0;
    for (const auto& v : values) s += static_cast<int>(v.size());
    return s;
}

EdgeFunction EdgeFunction::zeros(const MetricGraph& g, const Grids& grids) {
    g.check();
    if (static_cast<int>(grids.n.size()) != g.edges())
        throw std::runtime_error("bad-dimension");
    EdgeFunction u;
    u.values.reserve(g.edges());
    for (int e = 0; e < g.edges(); ++e) {
        if (grids.n[e] < 4) throw std::runtime_error("stencil-underflow");
        u.values.emplace_back(Vec::Zero(grids.n[e] + 1));
        u.lengths.push_back(g.length(e));
        u.transport.push_back(g.is_transport(e));
    }
    return u;
}

Vec EdgeFunction::flat() const {
    Vec out(total_nodes());
    int at = 0;
    for (const auto& v : values) {
        out.segment(at, v.size()) = v;
        at += static_cast<int>(v.size());
    }
    return out;
}

void EdgeFunction::set_flat(const Vec& v) {
    if (v.size() != total_nodes()) throw std::runtime_error("bad-dimension");
    int at = 0;
    for (auto& ev : values) {
        ev = v.segment(at, ev.size());
        at += static_cast<int>(ev.size());
    }
}

Eigen::VectorXd quad_weights(const EdgeFunction& u) {
    Eigen::VectorXd w(u.total_nodes());
    int at = 0;
    for (int e = 0; e < u.edges(); ++e) {
        const int m = u.n(e);
        const double h = u.h(e);
        w.segment(at, m + 1).setConstant(h);
        w[at] = 0.5 * h;
        w[at + m] = 0.5 * h;
        at += m + 1;
    }
    return w;
}

namespace {

// second-order one-sided derivative at the left/right end of a grid column
cplx dleft(const Vec& v, double h) {
    if (v.size() < 4) throw std::runtime_error("stencil-underflow");
    return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
}
cplx dright(const Vec& v, double h) {
    const auto m = v.size() - 1;
    if (v.size() < 4) throw std::runtime_error("stencil-underflow");
    return (3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) / (2.0 * h);
}

} // namespace

BoundaryVector trace(const EdgeFunction& u) {
    int D = 0;
    for (bool t : u.transport)
        if (!t) ++D;
    const int T = u.edges() - D;
    BoundaryVector b;
    b.v.resize(2 * D + T);
    int id = 0, it = 0;
    const double s = 1.0 / std::sqrt(2.0);
    for (int e = 0; e < u.edges(); ++e) {
        const Vec& v = u.values[e];
        const auto m = v.size() - 1;
        if (!u.transport[e]) {
            b.v[id] = v[m];      // d+: value at a
            b.v[D + id] = v[0];  // d-: value at 0
            ++id;
        } else {
            b.v[2 * D + it] = s * (v[m] + v[0]);
            ++it;
        }
    }
    return b;
}

BoundaryVector cotrace(const EdgeFunction& u) {
    int D = 0;
    for (bool t : u.transport)
        if (!t) ++D;
    const int T = u.edges() - D;
    BoundaryVector b;
    b.v.resize(2 * D + T);
    int id = 0, it = 0;
    const double s = 1.0 / std::sqrt(2.0);
    for (int e = 0; e < u.edges(); ++e) {
        const Vec& v = u.values[e];
        const auto m = v.size() - 1;
        if (!u.transport[e]) {
            const double h = u.h(e);
            b.v[id] = dright(v, h);       // u'(a)
            b.v[D + id] = -dleft(v, h);   // -u'(0)
            ++id;
        } else {
            b.v[2 * D + it] = s * (-v[m] + v[0]);
            ++it;
        }
    }
    return b;
}

BoundaryVector adjoint_trace(const EdgeFunction& v) { return trace(v); }

BoundaryVector adjoint_cotrace(const EdgeFunction& v) {
    BoundaryVector b = cotrace(v);
    int D = 0;
    for (bool t : v.transport)
        if (!t) ++D;
    b.v.tail(b.v.size() - 2 * D) *= -1.0; // J = diag(1_{2D}, -1_T)
    return b;
}

Norms norms(const EdgeFunction& u) {
    Norms out{0.0, 0.0, 0.0};
    double l2sq = 0.0, dsq = 0.0;
    for (int e = 0; e < u.edges(); ++e) {
        const Vec& v = u.values[e];
        const int m = u.n(e);
        const double h = u.h(e);
        Eigen::VectorXd w = Eigen::VectorXd::Constant(m + 1, h);
        w[0] = w[m] = 0.5 * h;
        l2sq += kern::wsumsq(w.data(), v.data(), m + 1);
        // centered differences inside, one-sided at the ends
        Vec d(m + 1);
        d[0] = dleft(v, h);
        d[m] = dright(v, h);
        for (int i = 1; i < m; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
        dsq += kern::wsumsq(w.data(), d.data(), m + 1);
        out.sup = std::max(out.sup, kern::max_abs(v.data(), m + 1));
    }
    out.l2 = std::sqrt(l2sq);
    out.h1 = std::sqrt(l2sq + dsq);
    return out;
}

double l2_norm(const EdgeFunction& u) { return norms(u).l2; }

TraceIneqReport trace_inequality_check(const EdgeFunction& u) {
    const Norms nm = norms(u);
    TraceIneqReport rep{0.0, 0.0, 0.0, true};
    const double c0 = 2.0 * std::sqrt(2.0);
    for (int e = 0; e < u.edges(); ++e) {
        const double ce = c0 * std::max(1.0, 1.0 / u.lengths[e]);
        const double rhs = ce * nm.l2 * nm.h1;
        for (int i = 0; i <= u.n(e); ++i) {
            const double lhs = std::norm(u.values[e][i]);
            const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? 1e300 : 0.0);
            if (ratio > rep.worst_ratio) {
                rep.worst_ratio = ratio;
                rep.lhs = lhs;
                rep.rhs = rhs;
            }
        }
    }
    rep.ok = rep.worst_ratio <= 1.0 + 1e-12;
    return rep;
}

double trace_constant(const MetricGraph& g) {
    double worst = 1.0;
    for (int e = 0; e < g.edges(); ++e)
        worst = std::max(worst, std::max(1.0, 1.0 / g.length(e)));
    // two endpoints per edge contribute, hence the factor 2 on 2*sqrt(2)
    return 4.0 * std::sqrt(2.0) * worst;
}

} // namespace mixgraph
