#include "mixgraph/resolvent.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mixgraph {

namespace {
const double SQ2 = std::sqrt(2.0);
const cplx I1(0.0, 1.0);

void endpoint_matrices(const SecularSystem& sys, cplx k, Mat& R1, Mat& R2) {
    const int D = sys.bc.D, T = sys.bc.T, n = sys.dim();
    R1 = Mat::Zero(n, n);
    R2 = Mat::Zero(n, n);
    for (int i = 0; i < D; ++i) {
        const double a = sys.g.diffusion_lengths[i];
        R2(i, D + i) = std::exp(I1 * k * a);
        R2(D + i, i) = 1.0;
        R1(i, D + i) = I1 * k * std::exp(I1 * k * a);
        R1(D + i, i) = I1 * k;
    }
    for (int j = 0; j < T; ++j) {
        R2(2 * D + j, 2 * D + j) = 1.0 / SQ2;
        R1(2 * D + j, 2 * D + j) = 1.0 / SQ2;
    }
}
} // namespace

GreenKernel assemble_kernel(const SecularSystem& sys, cplx k) {
    if (k == cplx(0.0, 0.0)) throw std::runtime_error("use zero-mode path");
    // reference scale for "det is negligible": median |det Z| on a small
    // circle around k, so the test is insensitive to global det magnitude
    const double r = std::max(0.1, 0.01 * std::abs(k));
    std::vector<double> mags;
    mags.reserve(8);
    for (int t = 0; t < 8; ++t) {
        const double th = 2.0 * M_PI * (t + 0.5) / 8.0;
        const cplx kk = k + r * std::exp(I1 * th);
        if (kk == cplx(0.0, 0.0)) continue;
        mags.push_back(std::abs(sys.det_Z(kk)));
    }
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    const double scale = std::max(mags[mags.size() / 2], 1e-300);

    const Mat Z = sys.Z(k);
    const double det = std::abs(Z.determinant());
    if (det < 1e-10 * scale) throw std::runtime_error("lambda-in-spectrum");

    GreenKernel K;
    K.g = sys.g;
    K.bc = sys.bc;
    K.k = k;
    endpoint_matrices(sys, k, K.R1, K.R2);
    K.sigma = Z.partialPivLu().solve(sys.bc.Pperp() * K.R1 + (sys.bc.P + sys.bc.L) * K.R2);
    Eigen::JacobiSVD<Mat> svd(Z);
    const auto& sv = svd.singularValues();
    K.cond_Z = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
    K.abs_det = det;
    K.det_scale = scale;
    return K;
}

cplx kernel_eval(const GreenKernel& K, int ex, double x, int ey, double y) {
    const int D = K.bc.D, T = K.bc.T, n = 2 * D + T;
    if (ex < 0 || ex >= D + T || ey < 0 || ey >= D + T)
        throw std::runtime_error("bad-dimension");
    const double ax = K.g.length(ex), ay = K.g.length(ey);
    if (x < -1e-9 * ax || x > ax * (1.0 + 1e-9) || y < -1e-9 * ay || y > ay * (1.0 + 1e-9))
        throw std::runtime_error("bad-dimension");
    const cplx k = K.k;
    cplx r0 = 0.0;
    if (ex == ey) {
        if (!K.g.is_transport(ex))
            r0 = std::exp(I1 * k * std::abs(x - y));
        else if (x < y)
            r0 = std::exp(k * k * (x - y));
    }
    Vec phi = Vec::Zero(n), psi = Vec::Zero(n);
    if (!K.g.is_transport(ex)) {
        phi[ex] = std::exp(I1 * k * x);
        phi[D + ex] = std::exp(-I1 * k * x);
    } else {
        phi[2 * D + (ex - D)] = std::exp(k * k * x);
    }
    if (!K.g.is_transport(ey)) {
        psi[ey] = std::exp(I1 * k * y);
        psi[D + ey] = std::exp(-I1 * k * y);
    } else {
        psi[2 * D + (ey - D)] = std::exp(-k * k * y);
    }
    const Vec t = K.sigma * psi;
    cplx corr = 0.0;
    for (int i = 0; i < n; ++i) corr += phi[i] * t[i];
    const cplx w = K.g.is_transport(ey) ? cplx(1.0) : 1.0 / (2.0 * I1 * k);
    return (r0 - corr) * w;
}

EdgeFunction apply_resolvent(const GreenKernel& K, const EdgeFunction& u) {
    const int D = K.bc.D, T = K.bc.T;
    if (u.edges() != D + T) throw std::runtime_error("bad-dimension");
    const cplx k = K.k;
    const cplx wd = 1.0 / (2.0 * I1 * k);

    Vec m = Vec::Zero(2 * D + T);
    for (int i = 0; i < D; ++i) {
        const int n = u.n(i);
        const double h = u.h(i);
        cplx q1 = 0.0, q2 = 0.0;
        for (int p = 0; p <= n; ++p) {
            const double wq = (p == 0 || p == n) ? h / 2 : h;
            const cplx ph = std::exp(I1 * k * (p * h));
            q1 += wq * ph * u.values[i][p];
            q2 += wq * u.values[i][p] / ph;
        }
        m[i] = wd * q1;
        m[D + i] = wd * q2;
    }
    for (int j = 0; j < T; ++j) {
        const int e = D + j;
        const int n = u.n(e);
        const double h = u.h(e);
        cplx q3 = 0.0;
        for (int p = 0; p <= n; ++p) {
            const double wq = (p == 0 || p == n) ? h / 2 : h;
            q3 += wq * std::exp(-k * k * (p * h)) * u.values[e][p];
        }
        m[2 * D + j] = q3;
    }
    const Vec c = K.sigma * m;

    EdgeFunction v = u;
    for (int i = 0; i < D; ++i) {
        const int n = u.n(i);
        const double h = u.h(i);
        const cplx g = std::exp(I1 * k * h);
        // prefix Pt[m] = trapz_{[0,x_m]} e^{ik(x_m-y)} u(y) dy and suffix
        // St[m] = trapz_{[x_m,a]} e^{ik(y-x_m)} u(y) dy, kept in shifted form
        // so every update multiplies by e^{ikh} only
        std::vector<cplx> Pt(n + 1), St(n + 1);
        Pt[0] = 0.0;
        for (int p = 1; p <= n; ++p)
            Pt[p] = g * Pt[p - 1] + (h / 2.0) * (g * u.values[i][p - 1] + u.values[i][p]);
        St[n] = 0.0;
        for (int p = n - 1; p >= 0; --p)
            St[p] = g * St[p + 1] + (h / 2.0) * (u.values[i][p] + g * u.values[i][p + 1]);
        for (int p = 0; p <= n; ++p) {
            const double x = p * h;
            const cplx corr = std::exp(I1 * k * x) * c[i] + std::exp(-I1 * k * x) * c[D + i];
            v.values[i][p] = wd * (Pt[p] + St[p]) - corr;
        }
    }
    for (int j = 0; j < T; ++j) {
        const int e = D + j;
        const int n = u.n(e);
        const double h = u.h(e);
        const cplx g = std::exp(-k * k * h);
        // St[m] = trapz_{[x_m,a]} e^{k^2(x_m-y)} u(y) dy; the flow kernel
        // vanishes on y < x and takes its right-limit value 1 at y = x
        std::vector<cplx> St(n + 1);
        St[n] = 0.0;
        for (int p = n - 1; p >= 0; --p)
            St[p] = g * St[p + 1] + (h / 2.0) * (u.values[e][p] + g * u.values[e][p + 1]);
        for (int p = 0; p <= n; ++p) {
            const double x = p * h;
            v.values[e][p] = St[p] - std::exp(k * k * x) * c[2 * D + j];
        }
    }
    return v;
}

} // namespace mixgraph
