#pragma once
// Boundary-condition pairs (P, L) on the boundary space C^{2D+T}:
// validation, dissipativity classification, the minimal quasi-dissipativity
// shift omega with its omega-tilde growth bound, adjoint conditions, and
// named example presets.

#include "mixgraph/graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mixgraph {

struct BoundaryConditions {
    Mat P, L;
    int D = 0, T = 0;

    int dim() const { return 2 * D + T; }
    Mat Pperp() const { return Mat::Identity(dim(), dim()) - P; }
    bool is_real() const;
};

struct Violation {
    std::string what;
    double residual;
};

// invariant checks: P Hermitian idempotent, L vanishing on Ran P (both sides);
// empty result means ok. Dimension mismatch throws "bad-dimension".
std::vector<Violation> validate(const BoundaryConditions& bc);
void require_valid(const BoundaryConditions& bc);

// lambda_min(Herm(L)) >= -1e-10, i.e. Re<Lx,x> >= 0 for all x
bool is_neg_L_dissipative(const BoundaryConditions& bc);

// feasibility of -Re<Lx,x> <= omega * |x_d|^2: transport-transport block of
// Herm(L) PSD and cross block compatible with its range
bool maincond_feasible(const BoundaryConditions& bc);

// smallest omega >= 0 with Herm(L) + omega * diag(1_{2D}, 0_T) PSD, by
// bisection; throws "maincond-violated" when infeasible
double minimal_omega(const BoundaryConditions& bc);

// omega^2 C^2 / 4 + 1 with omega = minimal_omega and C the graph trace constant
double omega_tilde(const BoundaryConditions& bc, double C);

// (P, L*) paired with adjoint traces; involution
BoundaryConditions adjoint_bc(const BoundaryConditions& bc);

// P one of {0, Id, diag(1_{2D},0), diag(0,1_T)} and L block-diagonal in the
// (2D, T) split: diffusion and transport subsystems do not interact
bool is_type_decoupling(const BoundaryConditions& bc);

struct DissipativityReport {
    bool neg_L_dissipative = false;
    bool maincond_feasible = false;
    std::optional<double> omega_min;
    std::optional<double> omega_tilde;
    bool type_decoupling = false;
};
DissipativityReport dissipativity_report(const MetricGraph& g, const BoundaryConditions& bc);

struct Preset {
    MetricGraph g;
    BoundaryConditions bc;
};

// names: dirichlet, neumann, transport-loop, secular-example, lc-example(C),
// alpha-example(alpha), dendrite-bdprime.
// Parameterized names take a literal in parentheses.
Preset preset(const std::string& name);
std::vector<std::string> preset_names();

} // namespace mixgraph
