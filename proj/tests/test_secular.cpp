#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <mixgraph/boundary.hpp>
#include <mixgraph/graph.hpp>
#include <mixgraph/secular.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

using namespace mixgraph;

namespace {

SecularSystem from_preset(const std::string& name) {
    Preset p = preset(name);
    return make_system(p.g, p.bc);
}

} // namespace

TEST_CASE("secular determinant matches the closed form on the secular example") {
    // one diffusion and one transport edge, both unit length:
    // det Z(k) = (i/sqrt2) [ sin k (1 - e^{k^2}) + k cos k (1 + e^{k^2}) ]
    auto sys = from_preset("secular-example");
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> re(-5.0, 5.0), im(-1.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const cplx k(re(rng), im(rng));
        const cplx lhs = sys.det_Z(k);
        const cplx ek2 = std::exp(k * k);
        const cplx rhs = cplx(0, 1) / std::sqrt(2.0) *
                         (std::sin(k) * (1.0 - ek2) + k * std::cos(k) * (1.0 + ek2));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("zero-mode matrices have the documented structure") {
    auto sys = from_preset("dendrite-bdprime");
    const Mat X0 = sys.X0();
    const Mat Y0 = sys.Y0();
    const int D = 2;

    // X0 = [1 diag(a_d) 0; 1 0 0; 0 0 sqrt2] over the (d+, d-, t) blocks
    for (int i = 0; i < D; ++i) {
        CHECK(X0(i, i) == cplx(1.0));
        CHECK(X0(i, D + i) == cplx(sys.g.diffusion_lengths[i]));
        CHECK(X0(D + i, i) == cplx(1.0));
        CHECK(X0(D + i, D + i) == cplx(0.0));
    }
    CHECK(X0(2 * D, 2 * D) == cplx(std::sqrt(2.0)));

    // Y0 couples only the slope coefficients of the diffusion edges
    for (int i = 0; i < D; ++i) {
        CHECK(Y0(i, D + i) == cplx(1.0));
        CHECK(Y0(D + i, D + i) == cplx(-1.0));
    }
    CHECK(Y0.col(2 * D).norm() == 0.0);

    CHECK_THROWS_WITH_AS((void)sys.Z(cplx(0.0)), "use zero-mode path", std::runtime_error);
}

TEST_CASE("make_system rejects mismatched boundary conditions") {
    Preset p = preset("dirichlet");
    p.bc.D = 2; // claims two diffusion edges, graph has one
    CHECK_THROWS_WITH_AS((void)make_system(p.g, p.bc), "bad-dimension", std::runtime_error);
}

TEST_CASE("Dirichlet interval eigenvalues are -(n pi)^2") {
    auto sys = from_preset("dirichlet");
    auto evs = find_eigenvalues(sys, {-0.5, 18.0, -1.0, 1.0});
    REQUIRE(evs.size() == 5);
    for (int n = 1; n <= 5; ++n) {
        // sorted by Re(lambda) descending, so index n-1 holds k = n pi
        const auto& ev = evs[n - 1];
        const double pin = n * M_PI;
        CHECK(std::abs(ev.k - cplx(pin)) <= 1e-8);
        CHECK(std::abs(ev.lambda - cplx(-pin * pin)) <= 1e-8 * pin * pin);
        CHECK(ev.multiplicity == 1);
        CHECK_FALSE(ev.zero_mode);
    }
}

TEST_CASE("transport loop eigenvalues are purely imaginary multiples of 2 pi") {
    auto sys = from_preset("transport-loop");
    auto evs = find_eigenvalues(sys, {-5.0, 5.0, -5.0, 5.0});
    int hits = 0;
    for (int n = -3; n <= 3; ++n) {
        if (n == 0) continue; // constant mode, not a root of det Z
        const cplx want = cplx(0.0, 2.0 * M_PI * n);
        for (const auto& ev : evs)
            if (std::abs(ev.lambda - want) <= 1e-8 * std::abs(want)) {
                ++hits;
                break;
            }
    }
    CHECK(hits == 6);

    auto zm = zero_eigenvalue(sys);
    REQUIRE(zm.has_value());
    CHECK(zm->lambda == cplx(0.0));
    CHECK(zm->zero_mode);
}

TEST_CASE("zero eigenvalue exists for the dendrite but not for Dirichlet") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> len(0.5, 2.0);
    for (int t = 0; t < 5; ++t) {
        Preset p = preset("dendrite-bdprime");
        for (auto& a : p.g.diffusion_lengths) a = len(rng);
        for (auto& a : p.g.transport_lengths) a = len(rng);
        auto zm = zero_eigenvalue(make_system(p.g, p.bc));
        REQUIRE(zm.has_value());
        CHECK(zm->multiplicity >= 1);
    }
    CHECK_FALSE(zero_eigenvalue(from_preset("dirichlet")).has_value());
}

TEST_CASE("eigenfunction reconstruction") {
    auto sys = from_preset("dirichlet");
    auto evs = find_eigenvalues(sys, {2.0, 4.0, -0.5, 0.5});
    REQUIRE(evs.size() == 1);
    const auto& ev = evs[0];

    const int n = 200;
    EdgeFunction u = eigenfunction(sys, ev, Grids::uniform(sys.g, n));
    REQUIRE(u.edges() == 1);
    REQUIRE(u.values[0].size() == n + 1);

    // L2-normalized sin(pi x): amplitude sqrt2 up to a global phase
    const double h = 1.0 / n;
    const cplx phase = u.values[0][n / 2] / cplx(std::sqrt(2.0));
    CHECK(std::abs(std::abs(phase) - 1.0) <= 1e-6);
    double worst = 0.0;
    for (int p = 0; p <= n; ++p) {
        const cplx want = phase * std::sqrt(2.0) * std::sin(M_PI * p * h);
        worst = std::max(worst, std::abs(u.values[0][p] - want));
    }
    CHECK(worst <= 1e-6);
    CHECK(l2_norm(u) == doctest::Approx(1.0).epsilon(1e-12));

    EigenvalueRecord bogus = ev;
    bogus.k = cplx(2.5); // not a root
    CHECK_THROWS_WITH_AS((void)eigenfunction(sys, bogus, Grids::uniform(sys.g, n)),
                         "not-an-eigenvalue", std::runtime_error);
    CHECK_THROWS_WITH_AS((void)eigenfunction(sys, EigenvalueRecord{}, Grids::uniform(sys.g, n)),
                         "not-an-eigenvalue", std::runtime_error);
}

TEST_CASE("search boxes with a root on the boundary still converge") {
    auto sys = from_preset("dirichlet");
    // pi and 2 pi sit exactly on the box edges; the contour reroll must nudge
    // the samples off the zeros instead of failing
    auto evs = find_eigenvalues(sys, {M_PI, 2.0 * M_PI, -1.0, 1.0});
    REQUIRE(!evs.empty());
    bool found = false;
    for (const auto& ev : evs) {
        const double d1 = std::abs(ev.k - cplx(M_PI));
        const double d2 = std::abs(ev.k - cplx(2.0 * M_PI));
        CHECK(std::min(d1, d2) <= 1e-7); // nothing spurious
        if (std::min(d1, d2) <= 1e-8) found = true;
    }
    CHECK(found);
}
