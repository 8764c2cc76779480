#pragma once

#include "mixgraph/evolution.hpp"
#include "mixgraph/secular.hpp"

#include <string>
#include <vector>

namespace mixgraph::io {

// key = value format; keys: diffusion, transport (length lists), optional
// vertices (endpoint pairs, diffusion edges first) and num_vertices
MetricGraph read_graph(const std::string& path);

// P and L as bracketed row lists of complex literals ("1.5", "2i", "0.5-0.25i")
BoundaryConditions read_bc(const std::string& path, int D, int T);

// expression in x: numeric literals, x, pi, sin cos exp sqrt, + - * / ^,
// parentheses, unary minus
double eval_expr(const std::string& expr, double x);

void write_edge_function(const std::string& path, const EdgeFunction& u);
EdgeFunction read_edge_function(const std::string& path);

void write_spectrum(const std::string& path, const std::vector<EigenvalueRecord>& evs);
void write_trajectory(const std::string& path, const Trajectory& traj);

cplx parse_complex(const std::string& tok);
std::string format_double(double v); // shortest round-trip decimal, LF-friendly

} // namespace mixgraph::io
