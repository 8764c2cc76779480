#include "mixgraph/secular.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixgraph {

namespace {
const double SQ2 = std::sqrt(2.0);
const cplx I1(0.0, 1.0);
} // namespace

SecularSystem make_system(const MetricGraph& g, const BoundaryConditions& bc) {
    g.check();
    if (bc.D != g.D() || bc.T != g.T() || bc.P.rows() != bc.dim())
        throw std::runtime_error("bad-dimension");
    return {g, bc};
}

Mat SecularSystem::X(cplx k) const {
    const int D = bc.D, T = bc.T, n = dim();
    Mat M = Mat::Zero(n, n);
    for (int i = 0; i < D; ++i) {
        const double a = g.diffusion_lengths[i];
        M(i, i) = std::exp(I1 * k * a);
        M(i, D + i) = std::exp(-I1 * k * a);
        M(D + i, i) = 1.0;
        M(D + i, D + i) = 1.0;
    }
    for (int j = 0; j < T; ++j) {
        const double a = g.transport_lengths[j];
        M(2 * D + j, 2 * D + j) = (1.0 + std::exp(k * k * a)) / SQ2;
    }
    return M;
}

Mat SecularSystem::Y(cplx k) const {
    const int D = bc.D, T = bc.T, n = dim();
    Mat M = Mat::Zero(n, n);
    for (int i = 0; i < D; ++i) {
        const double a = g.diffusion_lengths[i];
        M(i, i) = I1 * k * std::exp(I1 * k * a);
        M(i, D + i) = -I1 * k * std::exp(-I1 * k * a);
        M(D + i, i) = -I1 * k;
        M(D + i, D + i) = I1 * k;
    }
    for (int j = 0; j < T; ++j) {
        const double a = g.transport_lengths[j];
        M(2 * D + j, 2 * D + j) = (1.0 - std::exp(k * k * a)) / SQ2;
    }
    return M;
}

Mat SecularSystem::Z(cplx k) const {
    if (k == cplx(0.0, 0.0)) throw std::runtime_error("use zero-mode path");
    return (bc.P + bc.L) * X(k) + bc.Pperp() * Y(k);
}

Mat SecularSystem::X0() const {
    const int D = bc.D, T = bc.T, n = dim();
    Mat M = Mat::Zero(n, n);
    for (int i = 0; i < D; ++i) {
        M(i, i) = 1.0;
        M(i, D + i) = g.diffusion_lengths[i];
        M(D + i, i) = 1.0;
    }
    for (int j = 0; j < T; ++j) M(2 * D + j, 2 * D + j) = SQ2;
    return M;
}

Mat SecularSystem::Y0() const {
    const int D = bc.D, n = dim();
    Mat M = Mat::Zero(n, n);
    for (int i = 0; i < D; ++i) {
        M(i, D + i) = 1.0;
        M(D + i, D + i) = -1.0;
    }
    return M;
}

Mat SecularSystem::Z0() const { return (bc.P + bc.L) * X0() + bc.Pperp() * Y0(); }

cplx SecularSystem::det_Z(cplx k) const { return Z(k).determinant(); }

namespace {

struct Box {
    double x0, x1, y0, y1;
    double diag() const { return std::hypot(x1 - x0, y1 - y0); }
    bool contains(cplx k, double margin) const {
        const double mx = margin * (x1 - x0), my = margin * (y1 - y0);
        return k.real() >= x0 - mx && k.real() <= x1 + mx && k.imag() >= y0 - my &&
               k.imag() <= y1 + my;
    }
};

struct NeedReroll {};

class RootSearch {
public:
    RootSearch(const SecularSystem& sys, const SearchOptions& opts, const Region& region)
        : sys_(sys), opts_(opts), region_(region) {}

    std::vector<cplx> run() {
        for (const Box& b : clip_exclusion())
            descend(b, 0);
        return roots_;
    }

private:
    const SecularSystem& sys_;
    SearchOptions opts_;
    Region region_;
    std::vector<cplx> roots_;

    cplx f(cplx k) const { return sys_.det_Z(k); }

    // split the region so no box meets the square |Re k|,|Im k| <= r0 around
    // the excluded origin (lambda near 0 belongs to the zero-mode path)
    std::vector<Box> clip_exclusion() const {
        const double r = opts_.exclusion_radius;
        const Box whole{region_.re_min, region_.re_max, region_.im_min, region_.im_max};
        if (whole.x0 >= r || whole.x1 <= -r || whole.y0 >= r || whole.y1 <= -r)
            return {whole};
        std::vector<double> xs{whole.x0, whole.x1}, ys{whole.y0, whole.y1};
        if (-r > whole.x0 && -r < whole.x1) xs.push_back(-r);
        if (r > whole.x0 && r < whole.x1) xs.push_back(r);
        if (-r > whole.y0 && -r < whole.y1) ys.push_back(-r);
        if (r > whole.y0 && r < whole.y1) ys.push_back(r);
        std::sort(xs.begin(), xs.end());
        std::sort(ys.begin(), ys.end());
        std::vector<Box> out;
        for (size_t i = 0; i + 1 < xs.size(); ++i)
            for (size_t j = 0; j + 1 < ys.size(); ++j) {
                Box b{xs[i], xs[i + 1], ys[j], ys[j + 1]};
                const bool inside = b.x0 >= -r && b.x1 <= r && b.y0 >= -r && b.y1 <= r;
                if (!inside && b.x1 > b.x0 && b.y1 > b.y0) out.push_back(b);
            }
        return out;
    }

    double seg_arg(cplx za, cplx fa, cplx zb, cplx fb, int depth, double scale) const {
        if (std::abs(fa) < 1e-12 * scale || std::abs(fb) < 1e-12 * scale) throw NeedReroll{};
        const double dphi = std::arg(fb / fa);
        if (std::abs(dphi) <= 1.5707963267948966) return dphi;
        if (depth >= 48) throw NeedReroll{};
        const cplx zm = 0.5 * (za + zb);
        const cplx fm = f(zm);
        return seg_arg(za, fa, zm, fm, depth + 1, scale) + seg_arg(zm, fm, zb, fb, depth + 1, scale);
    }

    // winding number of det Z around the box; scale_out = median |det| on the boundary
    int winding(const Box& b, double& scale_out) const {
        const int m = opts_.samples_per_side;
        std::vector<cplx> zs;
        zs.reserve(4 * m);
        for (int i = 0; i < m; ++i) zs.emplace_back(b.x0 + (b.x1 - b.x0) * i / m, b.y0);
        for (int i = 0; i < m; ++i) zs.emplace_back(b.x1, b.y0 + (b.y1 - b.y0) * i / m);
        for (int i = 0; i < m; ++i) zs.emplace_back(b.x1 - (b.x1 - b.x0) * i / m, b.y1);
        for (int i = 0; i < m; ++i) zs.emplace_back(b.x0, b.y1 - (b.y1 - b.y0) * i / m);
        std::vector<cplx> fs(zs.size());
        std::vector<double> mags(zs.size());
        for (size_t i = 0; i < zs.size(); ++i) {
            fs[i] = f(zs[i]);
            mags[i] = std::abs(fs[i]);
            if (!std::isfinite(mags[i])) throw NeedReroll{};
        }
        std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
        const double scale = std::max(mags[mags.size() / 2], 1e-300);
        scale_out = scale;
        double total = 0.0;
        for (size_t i = 0; i < zs.size(); ++i) {
            const size_t j = (i + 1) % zs.size();
            total += seg_arg(zs[i], fs[i], zs[j], fs[j], 0, scale);
        }
        const double w = total / (2.0 * M_PI);
        const double r = std::round(w);
        if (std::abs(w - r) > 0.25) throw NeedReroll{};
        return static_cast<int>(r);
    }

    // winding with bounded retries on slightly inflated boxes
    int winding_stable(const Box& b, double& scale_out) const {
        for (int attempt = 0; attempt <= opts_.max_rerolls; ++attempt) {
            const double e = attempt * 7.3e-4 * b.diag();
            const Box bb{b.x0 - e, b.x1 + e, b.y0 - e, b.y1 + e};
            try {
                return winding(bb, scale_out);
            } catch (const NeedReroll&) {
            }
        }
        throw std::runtime_error("contour-reroll");
    }

    bool newton(cplx start, const Box& b, double tol, cplx& out) const {
        cplx k = start;
        const double limit = std::max(b.diag(), 1e-3);
        for (int it = 0; it < 80; ++it) {
            if (!b.contains(k, 2.0)) return false;
            const cplx fk = f(k);
            if (std::abs(fk) <= tol) {
                out = k;
                return true;
            }
            const double h = 1e-6 * std::max(1.0, std::abs(k));
            const cplx df = (f(k + h) - f(k - h)) / (2.0 * h);
            if (df == cplx(0.0, 0.0) || !std::isfinite(std::abs(df))) return false;
            cplx step = fk / df;
            if (std::abs(step) > limit) step *= limit / std::abs(step);
            k -= step;
        }
        return false;
    }

    void record_root(cplx k) {
        for (cplx r : roots_)
            if (std::abs(r - k) <= 1e-7 * (1.0 + std::abs(k))) return;
        roots_.push_back(k);
    }

    bool polish(const Box& b, double scale) {
        const double tol = opts_.root_tol_factor * scale;
        const cplx c(0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1));
        const cplx starts[5] = {c,
                                {0.75 * b.x0 + 0.25 * b.x1, 0.75 * b.y0 + 0.25 * b.y1},
                                {0.25 * b.x0 + 0.75 * b.x1, 0.75 * b.y0 + 0.25 * b.y1},
                                {0.75 * b.x0 + 0.25 * b.x1, 0.25 * b.y0 + 0.75 * b.y1},
                                {0.25 * b.x0 + 0.75 * b.x1, 0.25 * b.y0 + 0.75 * b.y1}};
        for (cplx s : starts) {
            cplx root;
            if (newton(s, b, tol, root) && b.contains(root, 0.5) &&
                std::abs(root) > opts_.exclusion_radius) {
                record_root(root);
                return true;
            }
        }
        return false;
    }

    void descend(const Box& b, int depth) {
        double scale = 1.0;
        const int w = winding_stable(b, scale);
        if (w == 0) return;
        if (b.diag() <= opts_.newton_box_diag || depth >= opts_.max_depth) {
            if (polish(b, scale)) return;
            if (depth >= opts_.max_depth) throw std::runtime_error("contour-reroll");
        }
        const double xm = 0.5 * (b.x0 + b.x1), ym = 0.5 * (b.y0 + b.y1);
        descend({b.x0, xm, b.y0, ym}, depth + 1);
        descend({xm, b.x1, b.y0, ym}, depth + 1);
        descend({b.x0, xm, ym, b.y1}, depth + 1);
        descend({xm, b.x1, ym, b.y1}, depth + 1);
    }
};

int null_space(const Mat& M, Vec& kernel_vec) {
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = 1e-8 * std::max(sv(0), 1e-300);
    int dim = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) < cut) ++dim;
    kernel_vec = svd.matrixV().col(sv.size() - 1);
    return dim;
}

} // namespace

std::vector<EigenvalueRecord> find_eigenvalues(const SecularSystem& sys, const Region& region,
                                               const SearchOptions& opts) {
    if (region.re_min >= region.re_max || region.im_min >= region.im_max)
        throw std::runtime_error("bad-dimension");
    RootSearch search(sys, opts, region);
    const std::vector<cplx> ks = search.run();

    std::vector<EigenvalueRecord> out;
    for (cplx k : ks) {
        const cplx lam = -k * k;
        auto same = std::find_if(out.begin(), out.end(), [&](const EigenvalueRecord& r) {
            return std::abs(r.lambda - lam) <= 1e-7 * (1.0 + std::abs(lam));
        });
        if (same != out.end()) {
            // keep the representative with Im k >= 0, ties Re k >= 0
            const cplx a = same->k;
            auto better = [](cplx p, cplx q) {
                if (p.imag() != q.imag()) return p.imag() > q.imag();
                return p.real() >= q.real();
            };
            if (better(k, a)) same->k = k;
            continue;
        }
        EigenvalueRecord rec;
        rec.lambda = lam;
        rec.k = k;
        out.push_back(rec);
    }
    for (EigenvalueRecord& rec : out) {
        const Mat Zk = sys.Z(rec.k);
        rec.abs_det = std::abs(Zk.determinant());
        rec.multiplicity = std::max(1, null_space(Zk, rec.coeffs));
    }
    std::sort(out.begin(), out.end(), [](const EigenvalueRecord& a, const EigenvalueRecord& b) {
        return a.lambda.real() > b.lambda.real();
    });
    return out;
}

std::optional<EigenvalueRecord> zero_eigenvalue(const SecularSystem& sys) {
    const Mat Z0 = sys.Z0();
    double scale = 1.0;
    for (int r = 0; r < Z0.rows(); ++r) scale *= std::max(Z0.row(r).norm(), 1.0);
    const double det = std::abs(Z0.determinant());
    if (det > 1e-12 * scale) return std::nullopt;
    EigenvalueRecord rec;
    rec.lambda = 0.0;
    rec.k = 0.0;
    rec.zero_mode = true;
    rec.abs_det = det;
    rec.multiplicity = std::max(1, null_space(Z0, rec.coeffs));
    return rec;
}

EdgeFunction eigenfunction(const SecularSystem& sys, const EigenvalueRecord& rec,
                           const Grids& grids) {
    if (rec.coeffs.size() != sys.dim() || rec.multiplicity < 1)
        throw std::runtime_error("not-an-eigenvalue");
    {
        // reject coefficient vectors that are not near-null directions
        const Mat M = rec.zero_mode ? sys.Z0() : sys.Z(rec.k);
        const double scale = std::max(M.norm(), 1e-300);
        if ((M * rec.coeffs).norm() > 1e-6 * scale * rec.coeffs.norm())
            throw std::runtime_error("not-an-eigenvalue");
    }
    EdgeFunction u = EdgeFunction::zeros(sys.g, grids);
    const int D = sys.bc.D;
    for (int e = 0; e < sys.g.edges(); ++e) {
        const int m = u.n(e);
        for (int i = 0; i <= m; ++i) {
            const double x = u.x(e, i);
            if (!u.transport[e]) {
                const cplx al = rec.coeffs[e], be = rec.coeffs[D + e];
                u.values[e][i] = rec.zero_mode
                                     ? al + be * x
                                     : al * std::exp(I1 * rec.k * x) + be * std::exp(-I1 * rec.k * x);
            } else {
                const cplx ga = rec.coeffs[2 * D + (e - D)];
                u.values[e][i] = rec.zero_mode ? ga : ga * std::exp(rec.k * rec.k * x);
            }
        }
    }
    const double nrm = l2_norm(u);
    if (nrm > 0) {
        for (auto& v : u.values) v /= nrm;
    }
    return u;
}

} // namespace mixgraph
