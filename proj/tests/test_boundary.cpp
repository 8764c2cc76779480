#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixgraph/boundary.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <random>

using namespace mixgraph;

namespace {

const double SQ2 = std::sqrt(2.0);

Mat random_projector(int nb, int r, std::mt19937_64& rng) {
    if (r == 0) return Mat::Zero(nb, nb);
    std::normal_distribution<double> nd;
    Mat A(nb, r);
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < r; ++j) A(i, j) = cplx(nd(rng), nd(rng));
    Mat Q = Eigen::HouseholderQR<Mat>(A).householderQ() * Mat::Identity(nb, r);
    return Q * Q.adjoint();
}

// dissipative compatible L: P^perp (G G* + skew) P^perp
Mat random_dissipative_L(int nb, const Mat& Pp, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Mat G(nb, nb), K0(nb, nb);
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
            G(i, j) = cplx(nd(rng), nd(rng)) / std::sqrt(nb);
            K0(i, j) = cplx(nd(rng), nd(rng));
        }
    const Mat K = cplx(0, 0.5) * (K0 + K0.adjoint()) / std::sqrt(nb);
    return Pp * (G * G.adjoint() + K) * Pp;
}

// independent reference for the smallest omega with Herm(L) + omega Q >= 0
double schur_omega(const BoundaryConditions& bc) {
    const Mat H = 0.5 * (bc.L + bc.L.adjoint());
    const int d = 2 * bc.D, t = bc.T;
    const Mat Hdd = H.topLeftCorner(d, d), Hdt = H.topRightCorner(d, t),
              Htt = H.bottomRightCorner(t, t);
    Mat Htt_pinv = Mat::Zero(t, t);
    if (t > 0) {
        Eigen::SelfAdjointEigenSolver<Mat> es(Htt);
        const auto& ev = es.eigenvalues();
        const double cut = 1e-10 * std::max(ev.cwiseAbs().maxCoeff(), 1.0);
        Mat inv = Mat::Zero(t, t);
        for (int i = 0; i < t; ++i)
            if (ev(i) > cut) inv(i, i) = 1.0 / ev(i);
        Htt_pinv = es.eigenvectors() * inv * es.eigenvectors().adjoint();
    }
    const Mat S = Hdt * Htt_pinv * Hdt.adjoint() - Hdd;
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    return std::max(0.0, es.eigenvalues().maxCoeff());
}

} // namespace

TEST_CASE("validation catches broken conditions") {
    auto pr = preset("secular-example");
    CHECK(validate(pr.bc).empty());

    BoundaryConditions bad = pr.bc;
    bad.P(0, 1) = 0.3; // not a projector any more
    auto v = validate(bad);
    REQUIRE_FALSE(v.empty());
    bool found = false;
    for (const auto& viol : v)
        if (viol.what == "P²≠P") found = true;
    CHECK(found);

    BoundaryConditions nc = pr.bc;
    nc.L = Mat::Identity(3, 3); // does not annihilate Ran P
    auto v2 = validate(nc);
    REQUIRE_FALSE(v2.empty());
    CHECK_THROWS(require_valid(nc));
}

TEST_CASE("preset matrices") {
    CHECK_THROWS_WITH(preset("nonsense"), "unknown preset: nonsense");

    auto d1 = preset("dendrite-bdprime");
    CHECK(d1.bc.P.norm() == 0.0);
    CHECK(d1.bc.L(0, 0) == cplx(1.0));
    CHECK(d1.bc.L(3, 4) == cplx(-SQ2));
    CHECK(d1.bc.L(4, 0) == cplx(-SQ2));
    CHECK(d1.g.D() == 2);
    CHECK(d1.g.T() == 1);

    auto tl = preset("transport-loop(2.5)");
    CHECK(tl.g.transport_lengths[0] == 2.5);
}

TEST_CASE("dissipativity classes on the dendrite") {
    auto pr = preset("dendrite-bdprime");
    auto rep = dissipativity_report(pr.g, pr.bc);
    CHECK_FALSE(rep.neg_L_dissipative); // Herm(L) has a negative direction
    CHECK(rep.maincond_feasible);
    REQUIRE(rep.omega_min.has_value());
    CHECK(*rep.omega_min == doctest::Approx(0.5).epsilon(1e-9));
    REQUIRE(rep.omega_tilde.has_value());
    CHECK(*rep.omega_tilde == doctest::Approx(3.0).epsilon(1e-8));
    CHECK_FALSE(rep.type_decoupling);
}

TEST_CASE("minimal omega closed forms") {
    // alpha-example: omega = alpha^2/2, beyond the 2||L||+1 bracket for large alpha
    for (double alpha : {1.0, 3.0, 8.0}) {
        auto pr = preset("alpha-example(" + std::to_string(alpha) + ")");
        CHECK(minimal_omega(pr.bc) == doctest::Approx(alpha * alpha / 2).epsilon(1e-8));
    }

    // lc-example is dissipative outright
    auto lc = preset("lc-example(1.0)");
    CHECK(is_neg_L_dissipative(lc.bc));
    CHECK(minimal_omega(lc.bc) == 0.0);
}

TEST_CASE("minimal omega agrees with the Schur reference") {
    std::mt19937_64 rng(0xa11ce);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> dT(1, 3);

    // dissipative instances: both sides must report zero
    for (int trial = 0; trial < 10; ++trial) {
        const int D = dT(rng), T = dT(rng), nb = 2 * D + T;
        std::uniform_int_distribution<int> rr(0, nb);
        const Mat P = random_projector(nb, rr(rng), rng);
        const Mat Pp = Mat::Identity(nb, nb) - P;
        const Mat L = random_dissipative_L(nb, Pp, rng);
        BoundaryConditions bc{P, L, D, T};
        REQUIRE(validate(bc).empty());
        REQUIRE(maincond_feasible(bc));
        CHECK(minimal_omega(bc) == 0.0);
        CHECK(schur_omega(bc) == doctest::Approx(0.0).epsilon(1e-9));
    }

    // indefinite diffusion block, P = 0: omega comes from the bisection path
    for (int trial = 0; trial < 15; ++trial) {
        const int D = dT(rng), T = dT(rng), nb = 2 * D + T, d = 2 * D;
        Mat Hdd(d, d), Hdt(d, T), W(T, T), K0(nb, nb);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) Hdd(i, j) = cplx(nd(rng), nd(rng));
        Hdd = (0.5 * (Hdd + Hdd.adjoint())).eval();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < T; ++j) Hdt(i, j) = cplx(nd(rng), nd(rng));
        for (int i = 0; i < T; ++i)
            for (int j = 0; j < T; ++j) W(i, j) = cplx(nd(rng), nd(rng));
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) K0(i, j) = cplx(nd(rng), nd(rng));
        Mat H(nb, nb);
        H.topLeftCorner(d, d) = Hdd;
        H.topRightCorner(d, T) = Hdt;
        H.bottomLeftCorner(T, d) = Hdt.adjoint();
        H.bottomRightCorner(T, T) = W * W.adjoint() + 0.1 * Mat::Identity(T, T);
        const Mat L = H + cplx(0, 0.5) * (K0 + K0.adjoint());
        BoundaryConditions bc{Mat::Zero(nb, nb), L, D, T};
        REQUIRE(validate(bc).empty());
        REQUIRE(maincond_feasible(bc));
        const double w = minimal_omega(bc);
        const double ref = schur_omega(bc);
        CHECK(w == doctest::Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("infeasible transport block") {
    // negative Herm(L) on the transport part cannot be compensated by omega
    Mat P = Mat::Zero(3, 3), L = Mat::Zero(3, 3);
    L(2, 2) = -1.0;
    BoundaryConditions bc{P, L, 1, 1};
    CHECK(validate(bc).empty());
    CHECK_FALSE(maincond_feasible(bc));
    CHECK_THROWS_WITH(minimal_omega(bc), "maincond-violated");
}

TEST_CASE("adjoint conditions and type decoupling") {
    auto pr = preset("dendrite-bdprime");
    auto adj = adjoint_bc(pr.bc);
    CHECK(adj.L == pr.bc.L.adjoint());
    CHECK(adj.P == pr.bc.P);

    CHECK(is_type_decoupling(preset("dirichlet").bc));
    CHECK(is_type_decoupling(preset("neumann").bc));
    CHECK_FALSE(is_type_decoupling(pr.bc));
}
