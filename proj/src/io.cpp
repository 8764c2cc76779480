#include "mixgraph/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mixgraph::io {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_comments(const std::string& s) {
    std::string out;
    bool skip = false;
    for (char c : s) {
        if (c == '#') skip = true;
        if (c == '\n') skip = false;
        if (!skip) out += c;
    }
    return out;
}

// top-level assignments "key = value" where value may span lines via brackets
std::map<std::string, std::string> key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    size_t i = 0;
    const size_t n = text.size();
    auto skip_ws = [&] {
        while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    while (true) {
        skip_ws();
        if (i >= n) break;
        size_t ks = i;
        while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
        std::string key = text.substr(ks, i - ks);
        skip_ws();
        if (key.empty() || i >= n || text[i] != '=')
            throw std::runtime_error("parse error near '" + text.substr(ks, 20) + "'");
        ++i;
        skip_ws();
        size_t vs = i;
        int depth = 0;
        while (i < n) {
            char c = text[i];
            if (c == '[' || c == '(') ++depth;
            if (c == ']' || c == ')') --depth;
            if (c == '\n' && depth == 0) break;
            ++i;
        }
        std::string val = text.substr(vs, i - vs);
        while (!val.empty() && std::isspace(static_cast<unsigned char>(val.back()))) val.pop_back();
        kv[key] = val;
    }
    return kv;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::string body = s;
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') throw std::runtime_error("unterminated list");
        body = body.substr(1, body.size() - 2);
    }
    std::string tok;
    std::istringstream ss(body);
    while (std::getline(ss, tok, ',')) {
        std::istringstream ts(tok);
        double v;
        if (ts >> v) out.push_back(v);
    }
    return out;
}

std::vector<std::pair<int, int>> parse_pair_list(const std::string& s) {
    std::vector<std::pair<int, int>> out;
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '(') {
            size_t close = s.find(')', i);
            if (close == std::string::npos) throw std::runtime_error("unterminated pair");
            std::string body = s.substr(i + 1, close - i - 1);
            size_t comma = body.find(',');
            if (comma == std::string::npos) throw std::runtime_error("pair needs two entries");
            out.emplace_back(std::stoi(body.substr(0, comma)), std::stoi(body.substr(comma + 1)));
            i = close + 1;
        } else {
            ++i;
        }
    }
    return out;
}

// split a bracketed matrix "[ r00 r01 ; r10 r11 ]" or newline-separated rows
std::vector<std::vector<std::string>> parse_matrix_tokens(const std::string& s) {
    std::string body = s;
    size_t a = body.find('[');
    size_t b = body.rfind(']');
    if (a == std::string::npos || b == std::string::npos || b < a)
        throw std::runtime_error("matrix needs brackets");
    body = body.substr(a + 1, b - a - 1);
    for (char& c : body)
        if (c == ';') c = '\n';
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(body);
    std::string line;
    while (std::getline(lines, line)) {
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ts(line);
        std::vector<std::string> row;
        std::string tok;
        while (ts >> tok) row.push_back(tok);
        if (!row.empty()) rows.push_back(row);
    }
    return rows;
}

} // namespace

cplx parse_complex(const std::string& tok) {
    auto stod_checked = [&tok](const std::string& t) {
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &pos);
        } catch (const std::logic_error&) {
            throw std::runtime_error("bad literal: " + tok);
        }
        if (pos != t.size()) throw std::runtime_error("bad literal: " + tok);
        return v;
    };
    std::string s = tok;
    if (s.empty()) throw std::runtime_error("empty complex literal");
    if (s.back() != 'i' && s.back() != 'I') return {stod_checked(s), 0.0};
    s.pop_back(); // drop i
    // find the split between real and imaginary parts: last +/- that is not
    // an exponent sign and not leading
    size_t split = std::string::npos;
    for (size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto stod_all = [&](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return stod_checked(t);
    };
    if (split == std::string::npos) return {0.0, stod_all(s)};
    return {stod_all(s.substr(0, split)), stod_all(s.substr(split))};
}

MetricGraph read_graph(const std::string& path) {
    auto kv = key_values(strip_comments(slurp(path)));
    MetricGraph g;
    if (kv.count("diffusion")) g.diffusion_lengths = parse_double_list(kv["diffusion"]);
    if (kv.count("transport")) g.transport_lengths = parse_double_list(kv["transport"]);
    if (kv.count("vertices")) {
        g.endpoints = parse_pair_list(kv["vertices"]);
        int mx = -1;
        for (auto [u, v] : *g.endpoints) mx = std::max({mx, u, v});
        g.num_vertices = mx + 1;
        if (kv.count("num_vertices")) g.num_vertices = std::stoi(kv["num_vertices"]);
    }
    g.check();
    return g;
}

BoundaryConditions read_bc(const std::string& path, int D, int T) {
    auto kv = key_values(strip_comments(slurp(path)));
    const int nb = 2 * D + T;
    auto load = [&](const std::string& key) {
        if (!kv.count(key)) throw std::runtime_error("missing matrix: " + key);
        auto rows = parse_matrix_tokens(kv[key]);
        if (static_cast<int>(rows.size()) != nb) throw std::runtime_error("bad-dimension");
        Mat M(nb, nb);
        for (int r = 0; r < nb; ++r) {
            if (static_cast<int>(rows[r].size()) != nb) throw std::runtime_error("bad-dimension");
            for (int c = 0; c < nb; ++c) M(r, c) = parse_complex(rows[r][c]);
        }
        return M;
    };
    return BoundaryConditions{load("P"), load("L"), D, T};
}

namespace {

// recursive-descent expression evaluator
struct ExprParser {
    const std::string& s;
    size_t i = 0;
    double x;

    explicit ExprParser(const std::string& src, double xv) : s(src), x(xv) {}

    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail() const { throw std::runtime_error("bad-expression: " + s); }

    double expr() {
        double v = term();
        while (true) {
            if (eat('+'))
                v += term();
            else if (eat('-'))
                v -= term();
            else
                return v;
        }
    }
    double term() {
        double v = unary();
        while (true) {
            if (eat('*'))
                v *= unary();
            else if (eat('/'))
                v /= unary();
            else
                return v;
        }
    }
    double unary() {
        if (eat('-')) return -unary();
        return power();
    }
    double power() {
        double v = atom();
        if (eat('^')) return std::pow(v, unary());
        return v;
    }
    double atom() {
        ws();
        if (i >= s.size()) fail();
        char c = s[i];
        if (c == '(') {
            ++i;
            double v = expr();
            if (!eat(')')) fail();
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t pos = 0;
            double v = std::stod(s.substr(i), &pos);
            i += pos;
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = i;
            while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
            std::string name = s.substr(start, i - start);
            if (name == "x") return x;
            if (name == "pi") return M_PI;
            if (!eat('(')) fail();
            double a = expr();
            if (!eat(')')) fail();
            if (name == "sin") return std::sin(a);
            if (name == "cos") return std::cos(a);
            if (name == "exp") return std::exp(a);
            if (name == "sqrt") return std::sqrt(a);
            fail();
        }
        fail();
    }

    double run() {
        double v = expr();
        ws();
        if (i != s.size()) fail();
        return v;
    }
};

} // namespace

double eval_expr(const std::string& expr, double x) { return ExprParser(expr, x).run(); }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_edge_function(const std::string& path, const EdgeFunction& u) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open: " + path);
    out << "edge_id,kind,x,re,im\n";
    for (int e = 0; e < u.edges(); ++e) {
        const char* kind = u.transport[e] ? "transport" : "diffusion";
        for (int p = 0; p <= u.n(e); ++p)
            out << e << ',' << kind << ',' << format_double(u.x(e, p)) << ','
                << format_double(u.values[e][p].real()) << ','
                << format_double(u.values[e][p].imag()) << '\n';
    }
}

EdgeFunction read_edge_function(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    std::getline(in, line); // header
    struct Row {
        int e;
        bool tr;
        double x, re, im;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        Row r{};
        std::getline(ss, tok, ',');
        r.e = std::stoi(tok);
        std::getline(ss, tok, ',');
        r.tr = (tok == "transport");
        std::getline(ss, tok, ',');
        r.x = std::stod(tok);
        std::getline(ss, tok, ',');
        r.re = std::stod(tok);
        std::getline(ss, tok, ',');
        r.im = std::stod(tok);
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("bad-dimension");
    int ne = 0;
    for (const Row& r : rows) ne = std::max(ne, r.e + 1);
    EdgeFunction u;
    u.values.resize(ne);
    u.lengths.resize(ne);
    u.transport.resize(ne);
    for (int e = 0; e < ne; ++e) {
        std::vector<cplx> vals;
        double len = 0;
        bool tr = false;
        for (const Row& r : rows)
            if (r.e == e) {
                vals.emplace_back(r.re, r.im);
                len = std::max(len, r.x);
                tr = r.tr;
            }
        if (vals.size() < 2) throw std::runtime_error("bad-dimension");
        u.values[e] = Eigen::Map<Vec>(vals.data(), static_cast<long>(vals.size()));
        u.lengths[e] = len;
        u.transport[e] = tr;
    }
    return u;
}

void write_spectrum(const std::string& path, const std::vector<EigenvalueRecord>& evs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open: " + path);
    out << "re_lambda,im_lambda,re_k,im_k,multiplicity,abs_det\n";
    for (const auto& r : evs)
        out << format_double(r.lambda.real()) << ',' << format_double(r.lambda.imag()) << ','
            << format_double(r.k.real()) << ',' << format_double(r.k.imag()) << ','
            << r.multiplicity << ',' << format_double(r.abs_det) << '\n';
}

void write_trajectory(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open: " + path);
    out << "t,l2,max_imag\n";
    for (size_t i = 0; i < traj.times.size(); ++i)
        out << format_double(traj.times[i]) << ',' << format_double(traj.l2[i]) << ','
            << format_double(traj.max_imag[i]) << '\n';
}

} // namespace mixgraph::io
