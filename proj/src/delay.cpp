#include "mixgraph/delay.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace mixgraph {

namespace {
const double SQ2 = std::sqrt(2.0);

// conditions of the delayed pair written in the boundary space; the Robin
// identity makes the u1 trace at 1 equal to its own flux, so that row enters
// with sign -1 when eliminated onto the graph form
Mat derived_L() {
    Mat L = Mat::Zero(5, 5);
    L(0, 0) = -1.0;
    L(3, 0) = 1.0;
    L(3, 4) = -SQ2;
    L(4, 0) = -SQ2;
    L(4, 4) = 1.0;
    return L;
}

struct BdStepper {
    int n;
    double dt, tau;
    int K;
    int o1, o2, m = 0;
    ScalarFn history;
    Eigen::VectorXd U;
    std::vector<double> ghist;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;

    BdStepper(const DelayedProblem& prob, int n_, double dt_) : n(n_), dt(dt_), tau(prob.tau) {
        if (n < 4) throw std::runtime_error("stencil-underflow");
        if (dt <= 0 || tau <= 0) throw std::runtime_error("bad-dimension");
        K = static_cast<int>(std::llround(tau / dt));
        if (K < 1 || std::abs(K * dt - tau) >= 1e-12)
            throw std::runtime_error("delay-grid-mismatch");
        history = prob.history;
        const double h = 1.0 / n;
        const int N = 2 * (n + 1);
        o1 = 0;
        o2 = n + 1;
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
        for (int off : {o1, o2})
            for (int i = 1; i < n; ++i) {
                M(off + i, off + i) = 1 + 2 * dt / (h * h);
                M(off + i, off + i - 1) = -dt / (h * h);
                M(off + i, off + i + 1) = -dt / (h * h);
            }
        // u1(1) = d_x u1(1)
        M(o1 + n, o1 + n) = 1 - 3 / (2 * h);
        M(o1 + n, o1 + n - 1) = 4 / (2 * h);
        M(o1 + n, o1 + n - 2) = -1 / (2 * h);
        // d_x u1(0) = 0
        M(o1, o1) = -3 / (2 * h);
        M(o1, o1 + 1) = 4 / (2 * h);
        M(o1, o1 + 2) = -1 / (2 * h);
        // d_x u2(1) = 0
        M(o2 + n, o2 + n) = 3 / (2 * h);
        M(o2 + n, o2 + n - 1) = -4 / (2 * h);
        M(o2 + n, o2 + n - 2) = 1 / (2 * h);
        // -d_x u2(0) = g
        M(o2, o2) = 3 / (2 * h);
        M(o2, o2 + 1) = -4 / (2 * h);
        M(o2, o2 + 2) = 1 / (2 * h);
        lu.compute(M);

        U.resize(N);
        for (int p = 0; p <= n; ++p) {
            const double x = static_cast<double>(p) * h;
            U[o1 + p] = prob.f1(x);
            U[o2 + p] = prob.f2(x);
        }
        ghist.push_back(U[o1 + n]);
    }

    void advance() {
        const int j = m + 1 - K;
        const double g = j >= 0 ? ghist[j] : history(j * dt);
        Eigen::VectorXd rhs = U;
        rhs[o1] = 0.0;
        rhs[o1 + n] = 0.0;
        rhs[o2 + n] = 0.0;
        rhs[o2] = g;
        U = lu.solve(rhs);
        ghist.push_back(U[o1 + n]);
        ++m;
    }
};
} // namespace

BdPrime build_bdprime(double tau) {
    if (tau <= 0) throw std::runtime_error("bad-dimension");
    BdPrime bp;
    bp.g.diffusion_lengths = {1.0, 1.0};
    bp.g.transport_lengths = {tau};
    bp.g.endpoints = std::vector<std::pair<int, int>>{{0, 1}, {2, 3}, {1, 2}};
    bp.g.num_vertices = 4;
    bp.bc = BoundaryConditions{Mat::Zero(5, 5), derived_L(), 2, 1};
    return bp;
}

BdTrajectory solve_bd_direct(const DelayedProblem& prob, int n, double dt, double t_end) {
    BdStepper st(prob, n, dt);
    const int steps = static_cast<int>(std::llround(t_end / dt));
    BdTrajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(st.U);
    for (int s = 1; s <= steps; ++s) {
        st.advance();
        traj.times.push_back(s * dt);
        traj.states.push_back(st.U);
    }
    return traj;
}

DelayComparison compare_bd_bdprime(const DelayedProblem& prob, int n, double dt, double t_end) {
    BdStepper bd(prob, n, dt);

    const BdPrime bp = build_bdprime(prob.tau);
    const Grids grids = Grids::uniform(bp.g, n);
    const DiscreteOperator op = discretize(bp.g, bp.bc, grids);
    EdgeFunction u0 = EdgeFunction::zeros(bp.g, grids);
    for (int p = 0; p <= n; ++p) {
        u0.values[0][p] = prob.f1(u0.x(0, p));
        u0.values[1][p] = prob.f2(u0.x(1, p));
        u0.values[2][p] = prob.history(-u0.x(2, p));
    }
    Vec u = consistent_projection(op, u0.flat());
    Stepper st(op, dt, 1.0);

    const double h = 1.0 / n;
    auto wq = [&](int p) { return (p == 0 || p == n) ? h / 2 : h; };
    DelayComparison cmp;
    const int steps = static_cast<int>(std::llround(t_end / dt));
    for (int s = 0; s <= steps; ++s) {
        if (s > 0) {
            bd.advance();
            u = st.step(u);
        }
        double d2 = 0.0, r2 = 0.0;
        for (int blk = 0; blk < 2; ++blk)
            for (int p = 0; p <= n; ++p) {
                const int gi = blk * (n + 1) + p;
                const double diff = bd.U[gi] - u[gi].real();
                d2 += wq(p) * diff * diff;
                r2 += wq(p) * bd.U[gi] * bd.U[gi];
            }
        cmp.times.push_back(s * dt);
        cmp.discrepancy.push_back(std::sqrt(d2));
        cmp.sup_discrepancy = std::max(cmp.sup_discrepancy, std::sqrt(d2));
        cmp.ref_norm = std::max(cmp.ref_norm, std::sqrt(r2));
    }
    return cmp;
}

} // namespace mixgraph
