#include "mixgraph/boundary.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mixgraph {

namespace {

constexpr double kIdTol = 1e-12;   // matrix identity checks, unit-scaled
constexpr double kPsdTol = 1e-10;  // eigenvalue nonnegativity

Mat herm(const Mat& M) { return 0.5 * (M + M.adjoint()); }

double max_abs_entry(const Mat& M) {
    return M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
}

double lambda_min(const Mat& hermitian) {
    if (hermitian.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double op_norm(const Mat& M) {
    if (M.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Mat>(M).singularValues()(0);
}

// Herm(L) split into diffusion/transport blocks
struct HermBlocks {
    Mat dd, dt, tt; // td = dt*
};
HermBlocks herm_blocks(const BoundaryConditions& bc) {
    const Mat H = herm(bc.L);
    const int d = 2 * bc.D, t = bc.T;
    return {H.topLeftCorner(d, d), H.topRightCorner(d, t), H.bottomRightCorner(t, t)};
}

} // namespace

bool BoundaryConditions::is_real() const {
    return max_abs_entry(P.imag()) == 0.0 && max_abs_entry(L.imag()) == 0.0;
}

std::vector<Violation> validate(const BoundaryConditions& bc) {
    const int n = bc.dim();
    if (bc.P.rows() != n || bc.P.cols() != n || bc.L.rows() != n || bc.L.cols() != n)
        throw std::runtime_error("bad-dimension");
    std::vector<Violation> out;
    auto check = [&](const char* what, const Mat& M) {
        const double r = max_abs_entry(M);
        if (r > kIdTol) out.push_back({what, r});
    };
    check("P≠P*", bc.P - bc.P.adjoint());
    check("P²≠P", bc.P * bc.P - bc.P);
    check("LP≠0", bc.L * bc.P);
    check("PL≠0", bc.P * bc.L);
    return out;
}

void require_valid(const BoundaryConditions& bc) {
    auto v = validate(bc);
    if (!v.empty()) throw std::runtime_error(v.front().what);
}

bool is_neg_L_dissipative(const BoundaryConditions& bc) {
    return lambda_min(herm(bc.L)) >= -kPsdTol;
}

bool maincond_feasible(const BoundaryConditions& bc) {
    if (bc.T == 0) return true;
    const auto [Hdd, Hdt, Htt] = herm_blocks(bc);
    const double scale = std::max(1.0, op_norm(herm(bc.L)));
    if (lambda_min(Htt) < -kPsdTol * scale) return false;
    if (bc.D == 0) return true;
    // range condition: columns of Hdt* (= rows of Hdt) inside Ran(Htt)
    Eigen::JacobiSVD<Mat> svd(Htt, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double cut = kPsdTol * std::max(scale, sv.size() ? sv(0) : 0.0);
    Mat resid = Hdt.adjoint(); // t x d
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) resid -= svd.matrixU().col(i) * (svd.matrixU().col(i).adjoint() * Hdt.adjoint());
    return max_abs_entry(resid) <= kPsdTol * scale;
}

double minimal_omega(const BoundaryConditions& bc) {
    if (!maincond_feasible(bc)) throw std::runtime_error("maincond-violated");
    const Mat H = herm(bc.L);
    const int n = bc.dim(), d = 2 * bc.D;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    q.head(d).setOnes();
    const double scale = std::max(1.0, op_norm(bc.L));
    auto psd_at = [&](double w) {
        return lambda_min(H + (w * q).asDiagonal().toDenseMatrix().cast<cplx>()) >= -kPsdTol * scale;
    };
    if (psd_at(0.0)) return 0.0;
    double hi = 2.0 * op_norm(bc.L) + 1.0;
    // the prescribed interval suffices unless a nearly singular transport
    // block inflates the Schur complement; grow geometrically in that case
    int guard = 0;
    while (!psd_at(hi)) {
        hi *= 2.0;
        if (++guard > 60) throw std::runtime_error("maincond-violated");
    }
    double lo = 0.0;
    for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (psd_at(mid) ? hi : lo) = mid;
    }
    // certify against random unit vectors
    std::mt19937_64 rng(0xb0541);
    std::normal_distribution<double> nd;
    for (int s = 0; s < 2000; ++s) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = cplx(nd(rng), nd(rng));
        x /= x.norm();
        const double lhs = -std::real(cplx(x.adjoint() * (bc.L * x)));
        const double rhs = hi * x.head(d).squaredNorm();
        if (lhs > rhs + 1e-8 * scale) throw std::runtime_error("maincond-violated");
    }
    return hi;
}

double omega_tilde(const BoundaryConditions& bc, double C) {
    const double w = minimal_omega(bc);
    return w * w * C * C / 4.0 + 1.0;
}

BoundaryConditions adjoint_bc(const BoundaryConditions& bc) {
    return {bc.P, bc.L.adjoint(), bc.D, bc.T};
}

bool is_type_decoupling(const BoundaryConditions& bc) {
    const int n = bc.dim(), d = 2 * bc.D;
    Mat dblock = Mat::Zero(n, n);
    dblock.topLeftCorner(d, d).setIdentity();
    const Mat id = Mat::Identity(n, n);
    const bool p_ok = max_abs_entry(bc.P) <= kIdTol ||
                      max_abs_entry(bc.P - id) <= kIdTol ||
                      max_abs_entry(bc.P - dblock) <= kIdTol ||
                      max_abs_entry(bc.P - (id - dblock)) <= kIdTol;
    if (!p_ok) return false;
    return max_abs_entry(bc.L.topRightCorner(d, bc.T)) <= kIdTol &&
           max_abs_entry(bc.L.bottomLeftCorner(bc.T, d)) <= kIdTol;
}

DissipativityReport dissipativity_report(const MetricGraph& g, const BoundaryConditions& bc) {
    require_valid(bc);
    DissipativityReport rep;
    rep.neg_L_dissipative = is_neg_L_dissipative(bc);
    rep.maincond_feasible = maincond_feasible(bc);
    rep.type_decoupling = is_type_decoupling(bc);
    if (rep.maincond_feasible) {
        rep.omega_min = minimal_omega(bc);
        const double C = trace_constant(g);
        rep.omega_tilde = (*rep.omega_min) * (*rep.omega_min) * C * C / 4.0 + 1.0;
    }
    return rep;
}

namespace {

const double SQ2 = std::sqrt(2.0);

MetricGraph chain_dt(double ad, double at) {
    MetricGraph g;
    g.diffusion_lengths = {ad};
    g.transport_lengths = {at};
    g.endpoints = std::vector<std::pair<int, int>>{{0, 1}, {1, 2}};
    g.num_vertices = 3;
    return g;
}

BoundaryConditions zero_bc(int D, int T) {
    const int n = 2 * D + T;
    return {Mat::Zero(n, n), Mat::Zero(n, n), D, T};
}

Mat dendrite_L() {
    Mat L = Mat::Zero(5, 5);
    L(0, 0) = 1.0;
    L(3, 0) = 1.0;
    L(3, 4) = -SQ2;
    L(4, 0) = -SQ2;
    L(4, 4) = 1.0;
    return L;
}

// "name(arg)" -> arg; plain name -> nullopt
std::optional<double> param_of(const std::string& name, std::string& base) {
    const auto lp = name.find('(');
    if (lp == std::string::npos) {
        base = name;
        return std::nullopt;
    }
    if (name.back() != ')') throw std::runtime_error("unknown preset: " + name);
    base = name.substr(0, lp);
    const std::string arg = name.substr(lp + 1, name.size() - lp - 2);
    size_t used = 0;
    double v = std::stod(arg, &used);
    if (used != arg.size()) throw std::runtime_error("unknown preset: " + name);
    return v;
}

} // namespace

Preset preset(const std::string& name) {
    std::string base;
    const std::optional<double> arg = param_of(name, base);

    if (base == "dirichlet") {
        MetricGraph g;
        g.diffusion_lengths = {1.0};
        BoundaryConditions bc = zero_bc(1, 0);
        bc.P = Mat::Identity(2, 2);
        return {g, bc};
    }
    if (base == "neumann") {
        MetricGraph g;
        g.diffusion_lengths = {1.0};
        return {g, zero_bc(1, 0)};
    }
    if (base == "transport-loop") {
        MetricGraph g;
        g.transport_lengths = {arg.value_or(1.0)};
        g.endpoints = std::vector<std::pair<int, int>>{{0, 0}};
        g.num_vertices = 1;
        return {g, zero_bc(0, 1)};
    }
    if (base == "secular-example" || base == "lc-example") {
        MetricGraph g = chain_dt(1.0, 1.0);
        BoundaryConditions bc = zero_bc(1, 1);
        bc.P << 1, 0, 0, 0, 0.5, 0.5, 0, 0.5, 0.5;
        if (base == "lc-example") bc.L = arg.value_or(1.0) * bc.Pperp();
        return {g, bc};
    }
    if (base == "alpha-example") {
        const double alpha = arg.value_or(1.0);
        MetricGraph g = chain_dt(1.0, 1.0);
        BoundaryConditions bc = zero_bc(1, 1);
        bc.P(0, 0) = 1.0;
        bc.L(2, 1) = -SQ2 * alpha;
        bc.L(2, 2) = 1.0;
        return {g, bc};
    }
    if (base == "dendrite-bdprime") {
        MetricGraph g;
        g.diffusion_lengths = {1.0, 1.0};
        g.transport_lengths = {1.0};
        g.endpoints = std::vector<std::pair<int, int>>{{0, 1}, {2, 3}, {1, 2}};
        g.num_vertices = 4;
        BoundaryConditions bc = zero_bc(2, 1);
        bc.L = dendrite_L();
        return {g, bc};
    }
    throw std::runtime_error("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
    return {"dirichlet",       "neumann",       "transport-loop",  "secular-example",
            "lc-example(C)",   "alpha-example(a)", "dendrite-bdprime"};
}

} // namespace mixgraph
