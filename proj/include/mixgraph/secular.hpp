#pragma once
// Secular matrices and point spectrum: nonzero eigenvalues lambda = -k^2 are
// the roots of det Z(k) = 0 with Z(k) = (P+L)X(k) + Pperp Y(k); the zero
// eigenvalue is decided by the constant matrix Z0. Root search is
// argument-principle box counting plus Newton refinement; eigenfunctions are
// reconstructed from null vectors of Z.

#include "mixgraph/boundary.hpp"
#include "mixgraph/graph.hpp"

#include <optional>
#include <vector>

namespace mixgraph {

struct SecularSystem {
    MetricGraph g;
    BoundaryConditions bc;

    int dim() const { return bc.dim(); }
    // trace/cotrace of the exponential Ansatz, columns ordered (alpha_d, beta_d, gamma_t)
    Mat X(cplx k) const;
    Mat Y(cplx k) const;
    Mat Z(cplx k) const; // k = 0 -> "use zero-mode path"
    // affine Ansatz (alpha + beta x on diffusion, constants on transport)
    Mat X0() const;
    Mat Y0() const;
    Mat Z0() const;
    cplx det_Z(cplx k) const;
};

SecularSystem make_system(const MetricGraph& g, const BoundaryConditions& bc);

struct Region {
    double re_min, re_max, im_min, im_max;
};

struct SearchOptions {
    int max_depth = 12;
    int samples_per_side = 32;      // initial boundary sampling, refined adaptively
    double root_tol_factor = 1e-10; // |det| <= factor * boundary-median scale
    double exclusion_radius = 1e-3; // k = 0 neighborhood left to the zero-mode path
    double newton_box_diag = 0.08;  // start Newton when the box is this small
    int max_rerolls = 5;
};

struct EigenvalueRecord {
    cplx lambda;
    cplx k;                 // representative: Im k >= 0, ties Re k >= 0
    int multiplicity = 1;   // dim Ker Z(k) by SVD
    Vec coeffs;             // null vector (alpha_d, beta_d, gamma_t)
    bool zero_mode = false;
    double abs_det = 0.0;
};

// all roots of det Z in the region, deduplicated over k <-> -k, sorted by
// Re lambda descending; throws "contour-reroll" if a contour cannot be
// stabilized within max_rerolls
std::vector<EigenvalueRecord> find_eigenvalues(const SecularSystem& sys, const Region& region,
                                               const SearchOptions& opts = {});

// zero eigenvalue iff |det Z0| <= 1e-12 * scale
std::optional<EigenvalueRecord> zero_eigenvalue(const SecularSystem& sys);

// sample the Ansatz of a record on the given grids; throws "not-an-eigenvalue"
// when the null space is empty
EdgeFunction eigenfunction(const SecularSystem& sys, const EigenvalueRecord& rec, const Grids& grids);

} // namespace mixgraph
