#include "mixgraph/evolution.hpp"

#include "mixgraph/kernels.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace mixgraph {

namespace {
const double SQ2 = std::sqrt(2.0);
const cplx I1(0.0, 1.0);
} // namespace

EdgeFunction DiscreteOperator::wrap(const Vec& flat) const {
    EdgeFunction u = EdgeFunction::zeros(g, grids);
    u.set_flat(flat);
    return u;
}

double DiscreteOperator::l2(const Vec& flat) const {
    return std::sqrt(kern::wsumsq(w.data(), flat.data(), static_cast<size_t>(N)));
}

DiscreteOperator discretize(const MetricGraph& g, const BoundaryConditions& bc,
                            const Grids& grids) {
    g.check();
    const int D = g.D(), T = g.T(), E = D + T, nb = 2 * D + T;
    if (bc.D != D || bc.T != T || static_cast<int>(grids.n.size()) != E)
        throw std::runtime_error("bad-dimension");

    DiscreteOperator op;
    op.g = g;
    op.bc = bc;
    op.grids = grids;
    op.offs.resize(E + 1, 0);
    for (int e = 0; e < E; ++e) {
        if (grids.n[e] < 4) throw std::runtime_error("stencil-underflow");
        op.offs[e + 1] = op.offs[e] + grids.n[e] + 1;
    }
    op.N = op.offs[E];

    std::vector<Eigen::Triplet<cplx>> trip;
    for (int i = 0; i < D; ++i) {
        const int o = op.offs[i], n = grids.n[i];
        const double h = g.length(i) / n;
        for (int m = 1; m < n; ++m) {
            trip.emplace_back(o + m, o + m - 1, 1.0 / (h * h));
            trip.emplace_back(o + m, o + m, -2.0 / (h * h));
            trip.emplace_back(o + m, o + m + 1, 1.0 / (h * h));
        }
    }
    for (int j = 0; j < T; ++j) {
        const int e = D + j, o = op.offs[e], n = grids.n[e];
        const double h = g.length(e) / n;
        for (int m = 1; m <= n; ++m) {
            trip.emplace_back(o + m, o + m - 1, 1.0 / h);
            trip.emplace_back(o + m, o + m, -1.0 / h);
        }
    }
    op.A.resize(op.N, op.N);
    op.A.setFromTriplets(trip.begin(), trip.end());

    // trace and co-trace sampling, one-sided second-order stencils at the ends
    Mat Tr = Mat::Zero(nb, op.N), Co = Mat::Zero(nb, op.N);
    for (int i = 0; i < D; ++i) {
        const int o = op.offs[i], n = grids.n[i];
        const double h = g.length(i) / n;
        Tr(i, o + n) = 1.0;
        Tr(D + i, o) = 1.0;
        Co(i, o + n) = 3 / (2 * h);
        Co(i, o + n - 1) = -4 / (2 * h);
        Co(i, o + n - 2) = 1 / (2 * h);
        Co(D + i, o) = 3 / (2 * h);
        Co(D + i, o + 1) = -4 / (2 * h);
        Co(D + i, o + 2) = 1 / (2 * h);
    }
    for (int j = 0; j < T; ++j) {
        const int e = D + j, o = op.offs[e], n = grids.n[e];
        Tr(2 * D + j, o + n) = 1 / SQ2;
        Tr(2 * D + j, o) = 1 / SQ2;
        Co(2 * D + j, o + n) = -1 / SQ2;
        Co(2 * D + j, o) = 1 / SQ2;
    }
    op.B = bc.Pperp() * Co + (bc.P + bc.L) * Tr;
    {
        Eigen::JacobiSVD<Mat> svd(op.B);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 1e-12 * sv(0)) throw std::runtime_error("degenerate-bc");
    }

    for (int i = 0; i < D; ++i) op.slots.push_back(op.offs[i] + grids.n[i]);
    for (int i = 0; i < D; ++i) op.slots.push_back(op.offs[i]);
    for (int j = 0; j < T; ++j) op.slots.push_back(op.offs[D + j]);

    op.w.resize(op.N);
    for (int e = 0; e < E; ++e) {
        const int o = op.offs[e], n = grids.n[e];
        const double h = g.length(e) / n;
        for (int p = 0; p <= n; ++p) op.w[o + p] = (p == 0 || p == n) ? h / 2 : h;
    }
    return op;
}

Vec consistent_projection(const DiscreteOperator& op, const Vec& u0) {
    if (u0.size() != op.N) throw std::runtime_error("bad-dimension");
    const Mat BW = op.B * op.w.cwiseInverse().asDiagonal();
    const Mat S = BW * op.B.adjoint();
    const Vec mu = S.partialPivLu().solve(op.B * u0);
    return u0 - BW.adjoint() * mu;
}

Stepper::Stepper(const DiscreteOperator& op, double dt, double theta) : dt_(dt) {
    if (dt <= 0) throw std::runtime_error("bad-dimension");
    const int N = op.N;
    std::vector<bool> is_slot(N, false);
    for (int s : op.slots) is_slot[s] = true;

    std::vector<Eigen::Triplet<cplx>> lt, rt;
    for (int r = 0; r < N; ++r) {
        if (is_slot[r]) continue;
        lt.emplace_back(r, r, 1.0);
        rt.emplace_back(r, r, 1.0);
    }
    for (int c = 0; c < op.A.outerSize(); ++c)
        for (SpMat::InnerIterator it(op.A, c); it; ++it) {
            if (is_slot[it.row()]) continue;
            lt.emplace_back(it.row(), it.col(), -dt * theta * it.value());
            if (theta != 1.0) rt.emplace_back(it.row(), it.col(), dt * (1.0 - theta) * it.value());
        }
    for (size_t r = 0; r < op.slots.size(); ++r)
        for (int c = 0; c < N; ++c)
            if (op.B(r, c) != cplx(0.0, 0.0)) lt.emplace_back(op.slots[r], c, op.B(r, c));

    SpMat lhs(N, N);
    lhs.setFromTriplets(lt.begin(), lt.end());
    rhs_.resize(N, N);
    rhs_.setFromTriplets(rt.begin(), rt.end());
    lhs.makeCompressed();
    lu_.compute(lhs);
    if (lu_.info() != Eigen::Success) throw std::runtime_error("step-singular");
}

Vec Stepper::step(const Vec& u) const {
    const Vec b = rhs_ * u;
    Vec v = lu_.solve(b);
    if (lu_.info() != Eigen::Success) throw std::runtime_error("step-singular");
    return v;
}

Trajectory evolve(const DiscreteOperator& op, const EdgeFunction& u0, double t_end, double dt,
                  const EvolveOptions& opts) {
    if (t_end <= 0 || dt <= 0) throw std::runtime_error("bad-dimension");
    int nsteps = static_cast<int>(std::llround(t_end / dt));
    if (nsteps < 1) nsteps = 1;
    const double dte = t_end / nsteps;
    Stepper st(op, dte, opts.theta);

    Vec u = u0.flat();
    if (opts.project_initial) u = consistent_projection(op, u);

    Trajectory traj;
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.l2.push_back(op.l2(u));
        traj.max_imag.push_back(kern::max_abs_imag(u.data(), static_cast<size_t>(op.N)));
        if (opts.observer) opts.observer(t, u);
    };
    record(0.0);
    for (int s = 1; s <= nsteps; ++s) {
        u = st.step(u);
        record(s * dte);
    }
    traj.final_state = op.wrap(u);
    return traj;
}

EdgeFunction laplace_evolve(const DiscreteOperator& op, const EdgeFunction& u0, double t,
                            double eps, double n_quad, double dy) {
    if (t < 0 || eps <= 0 || n_quad <= 0 || dy <= 0) throw std::runtime_error("bad-dimension");
    const SecularSystem sys = make_system(op.g, op.bc);
    const Vec f0 = u0.flat();
    const Vec w0 = op.A * f0;
    const EdgeFunction w0e = op.wrap(w0);
    const bool real_data = kern::max_abs_imag(f0.data(), static_cast<size_t>(op.N)) <= 1e-14;

    Vec acc = Vec::Zero(op.N);
    Vec last = Vec::Zero(op.N);
    auto sweep = [&](double sign) {
        for (double y = dy / 2; y < n_quad; y += dy) {
            const cplx lam(eps, sign * y);
            const cplx k = I1 * std::sqrt(lam);
            const GreenKernel K = assemble_kernel(sys, k);
            const Vec rw = apply_resolvent(K, w0e).flat();
            last = (std::exp(t * lam) / lam) * rw;
            acc += last * dy;
        }
    };
    sweep(1.0);
    Vec full;
    if (real_data)
        full = acc + acc.conjugate();
    else {
        sweep(-1.0);
        full = acc;
    }
    const Vec v = f0 - full / (2.0 * M_PI);

    if (op.l2(last) * n_quad > 0.05 * std::max(op.l2(f0), op.l2(acc)))
        throw std::runtime_error("increase-n");
    return op.wrap(v);
}

} // namespace mixgraph
