#include "mixgraph/delay.hpp"
#include "mixgraph/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace mixgraph;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string out_dir = ".";
    unsigned long seed = 0;
    double tol = 1e-10;
    std::string preset_name, graph_file, bc_file;
};

void add_model_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--preset", c.preset_name, "named example system");
    cmd->add_option("--graph", c.graph_file, "graph description file");
    cmd->add_option("--bc", c.bc_file, "boundary condition file (P and L)");
}

std::pair<MetricGraph, BoundaryConditions> load_model(const Common& c) {
    if (!c.preset_name.empty()) {
        Preset p = preset(c.preset_name);
        return {p.g, p.bc};
    }
    if (c.graph_file.empty() || c.bc_file.empty())
        throw CLI::ValidationError("need --preset or both --graph and --bc");
    MetricGraph g = io::read_graph(c.graph_file);
    BoundaryConditions bc = io::read_bc(c.bc_file, g.D(), g.T());
    return {g, bc};
}

std::string out_path(const Common& c, const std::string& name) {
    fs::create_directories(c.out_dir);
    return (fs::path(c.out_dir) / name).string();
}

// per-edge initial data: one expression for all edges or a comma-separated list
EdgeFunction eval_initial(const MetricGraph& g, const Grids& grids, const std::string& expr_list) {
    std::vector<std::string> exprs;
    std::string cur;
    for (char ch : expr_list) {
        if (ch == ',') {
            exprs.push_back(cur);
            cur.clear();
        } else
            cur += ch;
    }
    exprs.push_back(cur);
    if (exprs.size() == 1) exprs.assign(static_cast<size_t>(g.edges()), exprs[0]);
    if (static_cast<int>(exprs.size()) != g.edges())
        throw std::runtime_error("bad-dimension");
    EdgeFunction u = EdgeFunction::zeros(g, grids);
    for (int e = 0; e < g.edges(); ++e)
        for (int p = 0; p <= u.n(e); ++p)
            u.values[e][p] = io::eval_expr(exprs[static_cast<size_t>(e)], u.x(e, p));
    return u;
}

int run_validate(const Common& c) {
    auto [g, bc] = load_model(c);
    g.check();
    std::printf("graph: %d diffusion, %d transport, boundary dim %d\n", g.D(), g.T(),
                g.boundary_dim());
    auto viol = validate(bc);
    if (!viol.empty()) {
        for (const auto& v : viol)
            std::printf("invalid: %s (residual %.3e)\n", v.what.c_str(), v.residual);
        return 2;
    }
    auto rep = dissipativity_report(g, bc);
    std::printf("-L dissipative (contraction class): %s\n",
                rep.neg_L_dissipative ? "yes" : "no");
    std::printf("mixed-sign condition feasible: %s\n", rep.maincond_feasible ? "yes" : "no");
    if (rep.omega_min)
        std::printf("minimal omega: %.12g\n", *rep.omega_min);
    if (rep.omega_tilde)
        std::printf("growth-bound omega~: %.12g\n", *rep.omega_tilde);
    std::printf("type decoupling: %s\n", rep.type_decoupling ? "yes" : "no");
    return 0;
}

int run_spectrum(const Common& c, const Region& region, bool include_zero) {
    auto [g, bc] = load_model(c);
    require_valid(bc);
    SecularSystem sys = make_system(g, bc);
    SearchOptions opts;
    opts.root_tol_factor = c.tol;
    auto evs = find_eigenvalues(sys, region, opts);
    if (include_zero) {
        if (auto z = zero_eigenvalue(sys)) evs.push_back(*z);
    }
    const std::string path = out_path(c, "spectrum.csv");
    io::write_spectrum(path, evs);
    std::printf("%zu eigenvalue(s) -> %s\n", evs.size(), path.c_str());
    return 0;
}

int run_resolve(const Common& c, double re_k, double im_k, const std::string& u0_spec,
                int n_per_edge) {
    auto [g, bc] = load_model(c);
    require_valid(bc);
    SecularSystem sys = make_system(g, bc);
    const cplx k(re_k, im_k);
    GreenKernel K = assemble_kernel(sys, k);
    Grids grids = Grids::uniform(g, n_per_edge);
    EdgeFunction u = eval_initial(g, grids, u0_spec);
    EdgeFunction v = apply_resolvent(K, u);

    // interior residual of (A + k^2) v - u with second-order stencils
    double num = 0, den = 0;
    for (int e = 0; e < g.edges(); ++e) {
        const int n = v.n(e);
        const double h = v.h(e);
        for (int p = 0; p <= n; ++p) {
            const double w = (p == 0 || p == n) ? h / 2 : h;
            den += w * std::norm(u.values[e][p]);
            const bool dyn = v.transport[e] ? (p >= 1) : (p >= 1 && p <= n - 1);
            if (!dyn) continue;
            cplx Av;
            if (!v.transport[e])
                Av = (v.values[e][p - 1] - 2.0 * v.values[e][p] + v.values[e][p + 1]) / (h * h);
            else
                Av = -(v.values[e][p] - v.values[e][p - 1]) / h;
            num += w * std::norm(Av + k * k * v.values[e][p] - u.values[e][p]);
        }
    }
    const double residual = std::sqrt(num / std::max(den, 1e-300));

    const std::string csv = out_path(c, "resolvent.csv");
    io::write_edge_function(csv, v);
    nlohmann::json meta{{"re_k", k.real()},
                        {"im_k", k.imag()},
                        {"re_lambda", (-k * k).real()},
                        {"im_lambda", (-k * k).imag()},
                        {"cond_Z", K.cond_Z},
                        {"abs_det_Z", K.abs_det},
                        {"interior_residual", residual}};
    const std::string mj = out_path(c, "resolvent_meta.json");
    std::ofstream(mj) << meta.dump(2) << '\n';
    std::printf("resolvent -> %s (residual %.3e)\n", csv.c_str(), residual);
    return 0;
}

int run_evolve(const Common& c, const std::string& u0_spec, double t_end, double dt,
               int n_per_edge, const std::string& scheme, bool laplace_check) {
    auto [g, bc] = load_model(c);
    require_valid(bc);
    Grids grids = Grids::uniform(g, n_per_edge);
    DiscreteOperator op = discretize(g, bc, grids);
    EdgeFunction u0 = eval_initial(g, grids, u0_spec);
    EvolveOptions opts;
    if (scheme == "cn")
        opts.theta = 0.5;
    else if (scheme != "be")
        throw CLI::ValidationError("--scheme must be be or cn");
    Trajectory traj = evolve(op, u0, t_end, dt, opts);
    io::write_trajectory(out_path(c, "trajectory.csv"), traj);
    io::write_edge_function(out_path(c, "final_state.csv"), traj.final_state);
    std::printf("evolved to t=%g: l2 %.6g -> %.6g\n", t_end, traj.l2.front(), traj.l2.back());
    if (laplace_check) {
        auto rep = dissipativity_report(g, bc);
        const double eps = (rep.omega_tilde ? *rep.omega_tilde : 1.0) + 0.5;
        EdgeFunction w = laplace_evolve(op, u0, t_end, eps, 1000.0);
        const Vec diff = w.flat() - traj.final_state.flat();
        std::printf("laplace cross-check (eps=%g): l2 difference %.3e\n", eps, op.l2(diff));
    }
    return 0;
}

int run_delay(const Common& c, double tau, const std::string& f1e, const std::string& f2e,
              const std::string& he, double t_end, double dt, int n_per_edge) {
    DelayedProblem prob;
    prob.tau = tau;
    prob.f1 = [f1e](double x) { return io::eval_expr(f1e, x); };
    prob.f2 = [f2e](double x) { return io::eval_expr(f2e, x); };
    prob.history = [he](double t) { return io::eval_expr(he, t); };
    DelayComparison cmp = compare_bd_bdprime(prob, n_per_edge, dt, t_end);
    const std::string path = out_path(c, "delay_compare.csv");
    std::ofstream out(path, std::ios::binary);
    out << "t,discrepancy\n";
    for (size_t i = 0; i < cmp.times.size(); ++i)
        out << io::format_double(cmp.times[i]) << ',' << io::format_double(cmp.discrepancy[i])
            << '\n';
    std::printf("sup discrepancy %.6e (reference norm %.6g) -> %s\n", cmp.sup_discrepancy,
                cmp.ref_norm, path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed diffusion-transport operators on metric graphs"};
    app.require_subcommand(1);
    Common c;
    app.add_option("--out-dir", c.out_dir, "directory for output files");
    app.add_option("--seed", c.seed, "seed for randomized subcommands");
    app.add_option("--tol", c.tol, "tolerance scale for root acceptance");

    auto* vcmd = app.add_subcommand("validate", "check boundary conditions and classify");
    add_model_flags(vcmd, c);

    auto* scmd = app.add_subcommand("spectrum", "eigenvalues from the secular determinant");
    add_model_flags(scmd, c);
    Region region{0.1, 10.0, -1.0, 1.0};
    bool include_zero = false;
    scmd->add_option("--re-min", region.re_min, "k-plane search box");
    scmd->add_option("--re-max", region.re_max, "k-plane search box");
    scmd->add_option("--im-min", region.im_min, "k-plane search box");
    scmd->add_option("--im-max", region.im_max, "k-plane search box");
    scmd->add_flag("--include-zero", include_zero, "also test lambda = 0");

    auto* rcmd = app.add_subcommand("resolve", "apply the resolvent at lambda = -k^2");
    add_model_flags(rcmd, c);
    double re_k = 1.0, im_k = 1.0;
    std::string u0_spec = "sin(pi*x)";
    int n_per_edge = 200;
    rcmd->add_option("--re-k", re_k, "Re k");
    rcmd->add_option("--im-k", im_k, "Im k");
    rcmd->add_option("--u0", u0_spec, "data expression(s) in x, comma separated per edge");
    rcmd->add_option("--n-per-edge", n_per_edge, "grid intervals per edge");

    auto* ecmd = app.add_subcommand("evolve", "implicit time stepping");
    add_model_flags(ecmd, c);
    double t_end = 1.0, dt = 1e-3;
    std::string scheme = "be";
    bool laplace_check = false;
    ecmd->add_option("--u0", u0_spec, "initial data expression(s)");
    ecmd->add_option("--t-end", t_end, "final time");
    ecmd->add_option("--dt", dt, "time step");
    ecmd->add_option("--n-per-edge", n_per_edge, "grid intervals per edge");
    ecmd->add_option("--scheme", scheme, "be (backward Euler) or cn (Crank-Nicolson)");
    ecmd->add_flag("--laplace-check", laplace_check, "cross-check via resolvent integral");

    auto* dcmd = app.add_subcommand("delay-compare", "delayed pair vs graph formulation");
    double tau = 1.0;
    std::string f1e = "1", f2e = "1", he = "exp(x)";
    dcmd->add_option("--tau", tau, "delay length");
    dcmd->add_option("--f1", f1e, "initial profile of the delayed interval");
    dcmd->add_option("--f2", f2e, "initial profile of the driven interval");
    dcmd->add_option("--history", he, "delayed trace on [-tau, 0], expression in x");
    dcmd->add_option("--t-end", t_end, "final time");
    dcmd->add_option("--dt", dt, "time step");
    dcmd->add_option("--n-per-edge", n_per_edge, "grid intervals per edge");

    CLI11_PARSE(app, argc, argv);

    try {
        if (vcmd->parsed()) return run_validate(c);
        if (scmd->parsed()) return run_spectrum(c, region, include_zero);
        if (rcmd->parsed()) return run_resolve(c, re_k, im_k, u0_spec, n_per_edge);
        if (ecmd->parsed()) return run_evolve(c, u0_spec, t_end, dt, n_per_edge, scheme, laplace_check);
        if (dcmd->parsed()) return run_delay(c, tau, f1e, f2e, he, t_end, dt, n_per_edge);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
