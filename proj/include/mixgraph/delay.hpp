#pragma once

#include "mixgraph/evolution.hpp"

#include <functional>

namespace mixgraph {

using ScalarFn = std::function<double(double)>;

// two heat intervals on (0,1) coupled through a delayed flux:
//   u1' = u1'', u2' = u2''
//   u1(t,1) = d_x u1(t,1), d_x u1(t,0) = 0, d_x u2(t,1) = 0
//   -d_x u2(t,0) = u1(t - tau, 1)
// history supplies u1(t,1) on [-tau, 0]; f1, f2 the initial profiles.
struct DelayedProblem {
    double tau = 1.0;
    ScalarFn f1, f2, history;
};

// the equivalent graph: two diffusion edges plus a transport edge of length
// tau that carries the delayed trace toward the coupled end
struct BdPrime {
    MetricGraph g;
    BoundaryConditions bc;
};
BdPrime build_bdprime(double tau = 1.0);

struct BdTrajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states; // [u1 nodes; u2 nodes], n+1 each
};

// implicit Euler with the delayed flux read from the stored trace history.
// throws "delay-grid-mismatch" unless tau is a step multiple.
BdTrajectory solve_bd_direct(const DelayedProblem& prob, int n, double dt, double t_end);

struct DelayComparison {
    double sup_discrepancy = 0.0; // max over time, weighted l2 over both intervals
    double ref_norm = 0.0;        // max over time of the direct-solution norm
    std::vector<double> times;
    std::vector<double> discrepancy;
};

// lockstep run of the direct delayed solver and the graph path on the same grid
DelayComparison compare_bd_bdprime(const DelayedProblem& prob, int n, double dt, double t_end);

} // namespace mixgraph
