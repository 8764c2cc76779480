#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixgraph/kernels.hpp"

#include <random>
#include <string>
#include <vector>

using mixgraph::kern::cplx;
namespace kern = mixgraph::kern;

namespace {

std::vector<cplx> random_vec(std::mt19937_64& rng, size_t n) {
    std::normal_distribution<double> nd;
    std::vector<cplx> v(n);
    for (auto& z : v) z = cplx(nd(rng), nd(rng));
    return v;
}

std::vector<double> random_weights(std::mt19937_64& rng, size_t n) {
    std::uniform_real_distribution<double> ud(0.1, 2.0);
    std::vector<double> w(n);
    for (auto& x : w) x = ud(rng);
    return w;
}

} // namespace

TEST_CASE("scalar backend is always available") {
    CHECK(kern::force_impl("scalar"));
    CHECK(std::string(kern::active_impl()) == "scalar");
}

TEST_CASE("backends agree with the scalar reference") {
    const std::string initial = kern::active_impl();
    std::mt19937_64 rng(0x5eed);
    const auto& ref = kern::scalar_ops();

    for (const char* name : {"scalar", "avx2", "neon"}) {
        if (!kern::force_impl(name)) continue;
        CAPTURE(name);
        const auto& ops = kern::active();
        // sizes around vector-width boundaries
        for (size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 64u, 1000u, 1001u}) {
            auto a = random_vec(rng, n);
            auto b = random_vec(rng, n);
            auto w = random_weights(rng, n);
            const double tol = 1e-13 * (1.0 + static_cast<double>(n));

            CHECK(ops.real_sumsq(a.data(), n) ==
                  doctest::Approx(ref.real_sumsq(a.data(), n)).epsilon(tol));
            CHECK(ops.wsumsq(w.data(), a.data(), n) ==
                  doctest::Approx(ref.wsumsq(w.data(), a.data(), n)).epsilon(tol));
            CHECK(std::abs(ops.cdotu(a.data(), b.data(), n) - ref.cdotu(a.data(), b.data(), n)) <=
                  tol * (1.0 + std::abs(ref.cdotu(a.data(), b.data(), n))));
            CHECK(std::abs(ops.cdotc(a.data(), b.data(), n) - ref.cdotc(a.data(), b.data(), n)) <=
                  tol * (1.0 + std::abs(ref.cdotc(a.data(), b.data(), n))));
            CHECK(ops.max_abs(a.data(), n) == ref.max_abs(a.data(), n));
            CHECK(ops.max_abs_imag(a.data(), n) == ref.max_abs_imag(a.data(), n));

            auto y1 = b, y2 = b;
            const cplx alpha(0.7, -0.3);
            ops.caxpy(alpha, a.data(), y1.data(), n);
            ref.caxpy(alpha, a.data(), y2.data(), n);
            for (size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-14);

            auto s1 = a, s2 = a;
            ops.cscale(alpha, s1.data(), n);
            ref.cscale(alpha, s2.data(), n);
            for (size_t i = 0; i < n; ++i) CHECK(std::abs(s1[i] - s2[i]) <= 1e-14);
        }
    }
    kern::force_impl(initial.c_str());
}

TEST_CASE("unknown backend is rejected") {
    const std::string initial = kern::active_impl();
    CHECK_FALSE(kern::force_impl("sse9"));
    CHECK(std::string(kern::active_impl()) == initial);
}

TEST_CASE("dispatch wrappers hit the active backend") {
    std::mt19937_64 rng(12);
    auto a = random_vec(rng, 33);
    const double direct = kern::active().max_abs(a.data(), a.size());
    CHECK(kern::max_abs(a.data(), a.size()) == direct);
}
