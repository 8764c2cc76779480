#pragma once

#include "mixgraph/resolvent.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <functional>

namespace mixgraph {

using SpMat = Eigen::SparseMatrix<cplx>;

// grid operator: second-difference rows on diffusion interiors, upwind rows on
// transport nodes 1..n, zero rows at the constraint slots. B carries the
// discretized boundary map; its row r replaces row slots[r] of the stepper LHS.
struct DiscreteOperator {
    MetricGraph g;
    BoundaryConditions bc;
    Grids grids;
    int N = 0;
    std::vector<int> offs;
    std::vector<int> slots;
    SpMat A;
    Mat B;
    Eigen::VectorXd w;

    EdgeFunction wrap(const Vec& flat) const;
    double l2(const Vec& flat) const;
};

// throws "degenerate-bc" when the discrete boundary map loses row rank
DiscreteOperator discretize(const MetricGraph& g, const BoundaryConditions& bc,
                            const Grids& grids);

// weighted-l2 orthogonal projection onto Ker B (KKT solve)
Vec consistent_projection(const DiscreteOperator& op, const Vec& u0);

// one-step theta scheme, constraint rows enforced exactly at the new time level
class Stepper {
public:
    Stepper(const DiscreteOperator& op, double dt, double theta = 1.0);
    Vec step(const Vec& u) const;
    double dt() const { return dt_; }

private:
    double dt_;
    SpMat rhs_;
    Eigen::SparseLU<SpMat> lu_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> l2;
    std::vector<double> max_imag;
    EdgeFunction final_state;
};

struct EvolveOptions {
    double theta = 1.0; // 1 backward Euler, 0.5 Crank-Nicolson
    bool project_initial = true;
    std::function<void(double, const Vec&)> observer;
};

Trajectory evolve(const DiscreteOperator& op, const EdgeFunction& u0, double t_end, double dt,
                  const EvolveOptions& opts = {});

// semigroup action via the resolvent integral on the line Re lambda = eps,
// midpoint rule with spacing dy truncated at |Im lambda| <= n_quad.
// pre: eps exceeds the growth bound of the semigroup.
// throws "increase-n" when the quadrature tail is not negligible.
EdgeFunction laplace_evolve(const DiscreteOperator& op, const EdgeFunction& u0, double t,
                            double eps, double n_quad, double dy = 0.5);

} // namespace mixgraph
