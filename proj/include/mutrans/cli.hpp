#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fourierops.hpp"
#include "fracdomain.hpp"
#include "halfline.hpp"
#include "io.hpp"
#include "muspace.hpp"
#include "parse.hpp"
#include "suite.hpp"
#include "symcore.hpp"
#include "wienerhopf.hpp"

namespace mutrans::cli {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParamSpec {
    std::string key;
    std::optional<std::string> def;  // nullopt: required; "" : optional and absent by default
    std::string help;
};

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> c{"check", "index", "factorize", "solve-halfline", "solve-interval", "trace", "fit-exponent", "suite"};
    return c;
}

inline const std::vector<ParamSpec>& command_params(const std::string& command) {
    static const std::map<std::string, std::vector<ParamSpec>> table{
        {"check",
         {{"symbol", std::nullopt, "symbol expression"},
          {"order", "", "order m (inferred when omitted)"},
          {"mu", std::nullopt, "tested type mu"},
          {"max-deriv", "3", "highest xi-derivative checked"},
          {"tol", "", "residual tolerance (module default when omitted)"}}},
        {"index",
         {{"symbol", std::nullopt, "symbol expression"},
          {"order", "", "order m"},
          {"sigma", "1", "tangential frequency"},
          {"T", "", "path radius (default 1e4 sigma)"},
          {"mu", "", "expected index"}}},
        {"factorize",
         {{"symbol", std::nullopt, "symbol expression"},
          {"order", "", "order m"},
          {"sigma", "1", "tangential frequency and Cayley scale"},
          {"mu0", "", "factorization index (computed when omitted)"},
          {"modes", "256", "circle points, power of two"}}},
        {"solve-halfline",
         {{"symbol", std::nullopt, "symbol expression"},
          {"order", "", "order m"},
          {"sigma", "1", "tangential frequency"},
          {"N", "65536", "grid size, power of two"},
          {"L", "20.48", "half-length of the line"},
          {"f", "exp", "right-hand side: exp | xexp | gauss | zero"},
          {"phi", "0", "boundary datum for gamma_{mu0-1,0}"},
          {"s", "", "Sobolev index for the mu-norm of the solution"},
          {"mapping-mu", "", "also run the mapping smoothness test for this mu"}}},
        {"solve-interval",
         {{"a", std::nullopt, "power a in (0, 2)"},
          {"N", "2048", "grid size, power of two"},
          {"f", "const", "right-hand side: const | getoor | zero | odd"},
          {"method", "box_fft", "box_fft | eigen_power"},
          {"L-box", "", "enclosing box half-length"},
          {"phi-left", "0", "left boundary datum"},
          {"phi-right", "0", "right boundary datum"},
          {"c0", "", "variable coefficient c(x) = c0 + c2 x^2 (switches to A^a)"},
          {"c2", "0", "quadratic coefficient of c(x)"},
          {"dump-operator", "", "write the operator matrix to this binary file"}}},
        {"trace",
         {{"mu", std::nullopt, "type mu, Re mu > -1"},
          {"M", "3", "number of traces"},
          {"sigma", "1", "decay rate and Xi scale"},
          {"N", "65536", "grid size, power of two"},
          {"L", "20.48", "half-length of the line"},
          {"u", "power", "test function: power | poisson"},
          {"input", "", "grid file (.csv or .bin) instead of a test function"},
          {"method", "limit", "limit | xi"}}},
        {"fit-exponent",
         {{"input", "", "interval data file (x and u columns)"},
          {"alpha", "", "synthetic exponent"},
          {"perturb", "0", "synthetic data d^alpha (1 + perturb d)"},
          {"N", "2048", "synthetic grid size"},
          {"endpoint", "both", "left | right | both"},
          {"d-min", "", "window start (default 20 h)"},
          {"d-max", "0.1", "window end"},
          {"expect", "", "expected exponent"},
          {"expect-tol", "0.05", "tolerance on the expected exponent"}}},
        {"suite", {{"jobs", "1", "worker threads"}, {"only", "", "comma-separated criterion ids"}}},
    };
    auto it = table.find(command);
    if (it == table.end()) throw UsageError("unknown command '" + command + "'");
    return it->second;
}

struct RunConfig {
    std::string command;
    std::map<std::string, std::string> params;
};

struct Report {
    json doc;
    int exit_code = 0;
    std::function<void(const std::string&)> dump;  // grid writer for --dump-grid
};

/// JSON text with doubles at 17 significant digits; non-finite numbers become null.
inline void write_json(const json& j, std::string& out, int level = 0) {
    auto pad = [&](int l) { out.append(std::size_t(2 * l), ' '); };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            std::size_t i = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++i) {
                pad(level + 1);
                out += json(it.key()).dump();
                out += ": ";
                write_json(it.value(), out, level + 1);
                if (i + 1 < j.size()) out += ',';
                out += '\n';
            }
            pad(level);
            out += '}';
            break;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                pad(level + 1);
                write_json(j[i], out, level + 1);
                if (i + 1 < j.size()) out += ',';
                out += '\n';
            }
            pad(level);
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            double v = j.get<double>();
            out += std::isfinite(v) ? mutrans::detail::fmt17(v) : "null";
            break;
        }
        default:
            out += j.dump();
    }
}

inline std::string to_json_text(const json& j) {
    std::string s;
    write_json(j, s);
    s += '\n';
    return s;
}

inline json cj(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json cj(const std::vector<cplx>& v) {
    json a = json::array();
    for (auto z : v) a.push_back(cj(z));
    return a;
}

/// Flat "key = value" text with optional [command] sections; keys before any section apply to every command that takes them.
inline std::map<std::string, std::string> read_config_file(const std::string& path, const std::string& command) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open config file " + path);
    std::set<std::string> known;
    for (const auto& p : command_params(command)) known.insert(p.key);
    std::map<std::string, std::string> out;
    std::string line, section;
    int row = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(is, line)) {
        ++row;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw UsageError(path + ":" + std::to_string(row) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(row) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw UsageError(path + ":" + std::to_string(row) + ": empty key");
        if (section == command) out[key] = value;
        else if (section.empty() && known.count(key) && !out.count(key)) out[key] = value;
    }
    return out;
}

namespace detail {

inline bool is_pow2(long long n) { return n > 0 && (n & (n - 1)) == 0; }

inline cplx parse_complex(const std::string& key, const std::string& text) {
    try {
        auto e = mutrans::detail::SymbolParser(text).parse_all();
        auto v = e->constant_value();
        if (!v) throw UsageError("--" + key + " must be a constant, got '" + text + "'");
        return *v;
    } catch (const Error& e) {
        throw UsageError("--" + key + ": " + e.what());
    }
}

/// Resolved parameters of one command; typed reads validate and record the input echo.
class Params {
public:
    explicit Params(const RunConfig& c) : command_(c.command), spec_(command_params(c.command)) {
        std::set<std::string> known;
        for (const auto& p : spec_) known.insert(p.key);
        for (const auto& [k, v] : c.params)
            if (!known.count(k)) throw UsageError("unknown parameter --" + k + " for command " + c.command);
        for (const auto& p : spec_) {
            auto it = c.params.find(p.key);
            if (it != c.params.end()) raw_[p.key] = it->second;
            else if (!p.def) throw UsageError("command " + c.command + " requires --" + p.key);
            else if (!p.def->empty()) raw_[p.key] = *p.def;
        }
    }

    bool has(const std::string& k) const { return raw_.count(k) > 0; }

    std::string str(const std::string& k, const std::vector<std::string>& allowed = {}) {
        std::string v = raw_.at(k);
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : " | ") + a;
            throw UsageError("--" + k + " must be one of " + list + ", got '" + v + "'");
        }
        echo_[k] = v;
        return v;
    }

    double real(const std::string& k, const std::function<bool(double)>& ok = nullptr, const std::string& what = "") {
        const std::string& t = raw_.at(k);
        char* end = nullptr;
        double v = std::strtod(t.c_str(), &end);
        if (t.empty() || *end != '\0' || !std::isfinite(v)) throw UsageError("--" + k + " must be a finite number, got '" + t + "'");
        if (ok && !ok(v)) throw UsageError("--" + k + " " + what + ", got " + t);
        echo_[k] = v;
        return v;
    }

    long long integer(const std::string& k, const std::function<bool(long long)>& ok = nullptr, const std::string& what = "") {
        const std::string& t = raw_.at(k);
        char* end = nullptr;
        double v = std::strtod(t.c_str(), &end);
        if (t.empty() || *end != '\0' || v != std::floor(v) || std::abs(v) > 1e15) throw UsageError("--" + k + " must be an integer, got '" + t + "'");
        auto n = static_cast<long long>(v);
        if (ok && !ok(n)) throw UsageError("--" + k + " " + what + ", got " + t);
        echo_[k] = n;
        return n;
    }

    cplx complex(const std::string& k) {
        cplx v = parse_complex(k, raw_.at(k));
        echo_[k] = cj(v);
        return v;
    }

    std::optional<cplx> opt_complex(const std::string& k) { return has(k) ? std::optional<cplx>(complex(k)) : std::nullopt; }
    std::optional<double> opt_real(const std::string& k, const std::function<bool(double)>& ok = nullptr, const std::string& what = "") {
        return has(k) ? std::optional<double>(real(k, ok, what)) : std::nullopt;
    }
    std::optional<std::string> opt_str(const std::string& k) { return has(k) ? std::optional<std::string>(str(k)) : std::nullopt; }

    /// Inputs echo in declaration order.
    json inputs() const {
        json j = json::object();
        for (const auto& p : spec_) {
            auto it = echo_.find(p.key);
            if (it != echo_.end()) j[p.key] = it->second;
        }
        return j;
    }

private:
    std::string command_;
    const std::vector<ParamSpec>& spec_;
    std::map<std::string, std::string> raw_;
    std::map<std::string, json> echo_;
};

/// Verdict list; tolerances are multiplied by MUTRANS_TOL_SCALE.
class Verdicts {
public:
    void check(const std::string& name, double value, double tol) {
        double t = tol * suite::tol_scale();
        bool ok = std::isfinite(value) && value <= t;
        passed_ = passed_ && ok;
        list_.push_back(json{{"name", name}, {"value", value}, {"tolerance", t}, {"passed", ok}});
    }
    void flag(const std::string& name, bool ok) {
        passed_ = passed_ && ok;
        list_.push_back(json{{"name", name}, {"passed", ok}});
    }
    bool passed() const { return passed_; }
    json to_json() const { return json{{"passed", passed_}, {"checks", list_}}; }

private:
    bool passed_ = true;
    json list_ = json::array();
};

struct Outcome {
    json results = json::object();
    Verdicts verdicts;
    json timings = json::object();
    std::function<void(const std::string&)> dump;
};

inline void dump_grid_file(const GridFunction& g, const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".bin") write_grid_binary(g, path);
    else write_text(path, grid_csv(g));
}

inline void dump_interval_file(const std::vector<double>& x, const std::vector<double>& u, const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".bin")
        throw Error("cli", "dump-grid", "interval data is written as CSV only");
    std::string s = "x,re,im\n";
    for (std::size_t i = 0; i < x.size(); ++i) s += mutrans::detail::fmt17(x[i]) + "," + mutrans::detail::fmt17(u[i]) + ",0\n";
    write_text(path, s);
}

inline json exponent_json(const ExponentFit& f) {
    return json{{"alpha_hat", f.alpha_hat}, {"d_min", f.d_min}, {"d_max", f.d_max}, {"fit_residual", f.fit_residual}};
}

inline BoundarySymbol read_symbol(Params& P) {
    std::string text = P.str("symbol");
    auto order = P.opt_complex("order");
    try {
        return parse_symbol(text, order);
    } catch (const Error& e) {
        throw UsageError(std::string("--symbol: ") + e.what());
    }
}

inline std::function<bool(long long)> grid_size_ok() {
    return [](long long n) { return is_pow2(n) && n >= 64 && n <= (1ll << 22); };
}
inline bool positive(double v) { return v > 0; }

inline Outcome cmd_check(Params& P) {
    BoundarySymbol p = read_symbol(P);
    cplx mu = P.complex("mu");
    int md = int(P.integer("max-deriv", [](long long n) { return n >= 0 && n <= 8; }, "must lie in 0..8"));
    auto tol = P.opt_real("tol", positive, "must be positive");
    Outcome o;
    double hom = check_homogeneity(p, 64);
    TransmissionReport t = check_mu_transmission(p, mu, md, tol ? *tol : -1.0);
    o.results["label"] = p.label;
    o.results["order"] = cj(p.order_m);
    o.results["homogeneity_residual"] = hom;
    o.results["mu"] = cj(t.mu);
    o.results["max_residual"] = t.max_residual;
    o.results["tolerance"] = t.tolerance;
    o.results["closed_form"] = t.closed_form;
    o.results["extrapolation_residual"] = t.extrapolation_residual;
    json per = json::array();
    for (const auto& s : t.per_sample) per.push_back(json{{"sigma", s.sigma}, {"k", s.k}, {"residual", s.residual}});
    o.results["per_sample"] = per;
    o.verdicts.check("homogeneity", hom, 1e-10);
    o.verdicts.check("transmission residual", t.max_residual, t.tolerance);
    return o;
}

inline Outcome cmd_index(Params& P) {
    BoundarySymbol p = read_symbol(P);
    double sigma = P.real("sigma", positive, "must be positive");
    auto T = P.opt_real("T", positive, "must be positive");
    auto mu = P.opt_complex("mu");
    Outcome o;
    IndexReport r = factorization_index(p, sigma, T ? *T : -1.0);
    o.results["mu0"] = cj(r.mu0);
    o.results["winding"] = r.winding;
    o.results["a_plus"] = cj(r.a_plus);
    o.results["a_minus"] = cj(r.a_minus);
    o.results["path_radius"] = r.path_radius;
    o.results["mod1"] = r.mod1;
    o.results["limit_change"] = r.limit_change;
    o.results["warning"] = r.warning;
    o.verdicts.check("limit convergence", r.limit_change, 1e-6);
    if (mu) o.verdicts.check("|mu0 - mu|", std::abs(r.mu0 - *mu), 1e-6);
    return o;
}

inline Outcome cmd_factorize(Params& P) {
    BoundarySymbol p = read_symbol(P);
    double sigma = P.real("sigma", positive, "must be positive");
    auto mu0_in = P.opt_complex("mu0");
    auto modes = std::size_t(P.integer("modes", [](long long n) { return is_pow2(n) && n >= 16 && n <= (1 << 20); }, "must be a power of two in [16, 2^20]"));
    Outcome o;
    cplx mu0 = mu0_in ? *mu0_in : factorization_index(p, sigma).mu0;
    SampledSymbol q = normalize_symbol(p, mu0, sigma, modes);
    cplx m = p.order_m;
    auto qe = [p, mu0, m, sigma](double xi) { return p.eval(sigma, xi) * std::pow(cplx(sigma, -xi), mu0 - m) * std::pow(cplx(sigma, xi), -mu0); };
    WienerHopfFactors f = factorize(q, qe);
    o.results["mu0"] = cj(mu0);
    o.results["winding"] = f.winding;
    o.results["recon_residual"] = f.recon_residual;
    o.results["support_leakage"] = f.support_leakage;
    o.results["tail_mass"] = f.tail_mass;
    o.results["warning"] = f.warning;
    json samples = json::array();
    for (double xi : {-10.0, -1.0, 0.0, 1.0, 10.0})
        samples.push_back(json{{"xi", xi}, {"q_plus", cj(f.plus_at(xi))}, {"q_minus", cj(f.minus_at(xi))}});
    o.results["samples"] = samples;
    o.verdicts.check("reconstruction", f.recon_residual, 1e-8);
    o.verdicts.check("analyticity leakage", f.support_leakage, 1e-10);
    o.dump = [f](const std::string& path) { write_text(path, factors_csv(f)); };
    return o;
}

inline std::function<double(double)> halfline_rhs(const std::string& kind) {
    if (kind == "exp") return [](double x) { return std::exp(-x); };
    if (kind == "xexp") return [](double x) { return x * std::exp(-x); };
    if (kind == "gauss") return [](double x) { return std::exp(-x * x); };
    return [](double) { return 0.0; };
}

inline Outcome cmd_solve_halfline(Params& P) {
    BoundarySymbol p = read_symbol(P);
    double sigma = P.real("sigma", positive, "must be positive");
    auto N = std::size_t(P.integer("N", grid_size_ok(), "must be a power of two in [64, 2^22]"));
    double L = P.real("L", positive, "must be positive");
    std::string fk = P.str("f", {"exp", "xexp", "gauss", "zero"});
    cplx phi = P.complex("phi");
    auto s = P.opt_real("s");
    auto mapping_mu = P.opt_complex("mapping-mu");
    Outcome o;
    ModelProblem pr = make_problem(p, sigma, N, L);
    GridFunction f = GridFunction::half_line(N, L, halfline_rhs(fk));
    bool nonhom = phi != cplx(0.0);
    SolveReport r = nonhom ? solve_nonhomogeneous(pr, f, phi) : solve_homogeneous(pr, f);
    o.results["mu0"] = cj(pr.mu0);
    o.results["method"] = r.method;
    o.results["residual"] = r.residual;
    o.results["residual_window"] = json::array({r.residual_lo, r.residual_hi});
    o.results["converged"] = r.converged;
    o.results["support_leakage"] = support_leakage(r.u, Side::nonneg);
    o.results["exponent"] = json{{"alpha_hat", r.exponent_fit.alpha_hat}, {"fit_residual", r.exponent_fit.fit_residual},
                                 {"window", json::array({pr.fit_lo_h * r.u.h(), pr.fit_hi})}};
    o.results["traces"] = json{{"mu", cj(r.traces.mu)}, {"values", cj(r.traces.values)}};
    if (s) {
        cplx mu_sp = nonhom ? pr.mu0 - 1.0 : pr.mu0;
        o.results["mu_norm"] = json{{"mu", cj(mu_sp)}, {"s", *s}, {"value", mu_norm(r.u, mu_sp, *s, sigma).value}};
    }
    o.verdicts.check("parametrix residual", r.residual, 1e-4);
    bool trivial = fk == "zero" && !nonhom;
    double m0 = pr.mu0.real();
    if (!trivial && pr.mu0.imag() == 0.0 && m0 > 0 && m0 < 2)
        o.verdicts.check("|alpha_hat - expected exponent|", std::abs(r.exponent_fit.alpha_hat - (nonhom ? m0 - 1 : m0)), 0.05);
    if (nonhom && !r.traces.values.empty())
        o.verdicts.check("trace recovery", std::abs(r.traces.values[0] - phi) / std::abs(phi), 5e-2);
    if (mapping_mu) {
        TransmissionMappingResult t = transmission_mapping_test(pr, *mapping_mu, [](double x) { return std::exp(-x); });
        o.results["mapping"] = json{{"mu", cj(*mapping_mu)}, {"score", t.score}, {"smooth", t.smooth}, {"inconclusive", t.inconclusive}, {"note", t.note}};
    }
    GridFunction u = r.u;
    o.dump = [u](const std::string& path) { dump_grid_file(u, path); };
    return o;
}

inline Outcome cmd_solve_interval(Params& P) {
    double a = P.real("a", [](double v) { return v > 0 && v < 2; }, "must lie in (0, 2)");
    auto N = std::size_t(P.integer("N", [](long long n) { return is_pow2(n) && n >= 64 && n <= 8192; }, "must be a power of two in [64, 8192]"));
    std::string fk = P.str("f", {"const", "getoor", "zero", "odd"});
    std::string method = P.str("method", {"box_fft", "eigen_power"});
    auto L_box = P.opt_real("L-box", positive, "must be positive");
    double phiL = P.real("phi-left"), phiR = P.real("phi-right");
    auto c0 = P.opt_real("c0");
    double c2 = P.real("c2");
    auto dump_op = P.opt_str("dump-operator");
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    IntervalOperator op;
    if (c0) {
        double lb = L_box ? *L_box : 2.0;
        for (double x = -lb; x <= lb; x += lb / 64)
            if (!(*c0 + c2 * x * x > 0)) throw UsageError("c(x) = c0 + c2 x^2 must stay positive on the box");
        op = fracpow_variable([c = *c0, c2](double x) { return c + c2 * x * x; }, a, N, lb);
    } else {
        op = assemble_fraclap(a, N, method == "box_fft" ? Construction::box_fft : Construction::eigen_power, L_box ? *L_box : 8.0);
    }
    o.timings["assemble_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<double> f(op.size());
    for (std::size_t i = 0; i < op.size(); ++i) {
        double x = op.x(i);
        f[i] = fk == "const" ? 1.0 : fk == "getoor" ? getoor_constant(a) : fk == "odd" ? x : 0.0;
    }
    bool nonhom = phiL != 0.0 || phiR != 0.0;
    IntervalReport r = nonhom ? solve_dirichlet_nonhomogeneous(op, f, phiL, phiR) : solve_dirichlet_homogeneous(op, f);
    o.results["method"] = r.method;
    o.results["construction"] = c0 ? std::string("eigen_power (variable coefficient)") : std::string(construction_name(op.construction));
    o.results["L_box"] = op.L_box;
    o.results["residual"] = r.residual;
    o.results["residual_window"] = r.residual_window;
    o.results["fits_valid"] = r.fits_valid;
    if (!r.fits_valid) o.results["fit_error"] = r.fit_error;
    o.results["left"] = exponent_json(r.left);
    o.results["right"] = exponent_json(r.right);
    double expected = nonhom ? a - 1.0 : a;
    o.results["expected_exponent"] = expected;
    if (nonhom) o.results["traces"] = json{{"left", r.trace_left}, {"right", r.trace_right}};
    o.results["interior_chebyshev"] = interior_chebyshev(r.x, r.u, 16);
    if (fk == "getoor" && !nonhom) {
        double num = 0, den = 0;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            double ex = std::pow(1 - r.x[i] * r.x[i], a);
            num += (r.u[i] - ex) * (r.u[i] - ex);
            den += ex * ex;
        }
        o.results["getoor_constant"] = getoor_constant(a);
        o.results["error_vs_closed_form"] = std::sqrt(num / den);
        o.verdicts.check("relative L2 error vs (1 - x^2)^a", std::sqrt(num / den), 1e-3);
    }
    bool trivial = fk == "zero" && !nonhom;
    if (!trivial) {
        o.verdicts.flag("exponent fits valid", r.fits_valid);
        if (r.fits_valid) {
            if (!nonhom || phiL != 0.0) o.verdicts.check("|alpha_hat - expected| left", std::abs(r.left.alpha_hat - expected), 0.05);
            if (!nonhom || phiR != 0.0) o.verdicts.check("|alpha_hat - expected| right", std::abs(r.right.alpha_hat - expected), 0.05);
        }
    }
    if (phiL != 0.0) o.verdicts.check("trace recovery left", std::abs(r.trace_left - phiL) / std::abs(phiL), 5e-2);
    if (phiR != 0.0) o.verdicts.check("trace recovery right", std::abs(r.trace_right - phiR) / std::abs(phiR), 5e-2);
    if (dump_op) write_operator_binary(op, *dump_op);
    std::vector<double> x = r.x, u = r.u;
    o.dump = [x, u](const std::string& path) { dump_interval_file(x, u, path); };
    return o;
}

inline Outcome cmd_trace(Params& P) {
    cplx mu = P.complex("mu");
    if (!(mu.real() > -1)) throw UsageError("--mu needs Re mu > -1");
    int M = int(P.integer("M", [](long long n) { return n >= 1 && n <= 4; }, "must lie in 1..4"));
    double sigma = P.real("sigma", positive, "must be positive");
    auto N = std::size_t(P.integer("N", grid_size_ok(), "must be a power of two in [64, 2^22]"));
    double L = P.real("L", positive, "must be positive");
    auto input = P.opt_str("input");
    std::string kind = input ? std::string() : P.str("u", {"power", "poisson"});
    std::string method = P.str("method", {"limit", "xi"});
    Outcome o;
    GridFunction u;
    std::vector<cplx> exact;
    if (input) {
        const std::string& path = *input;
        u = path.size() > 4 && path.substr(path.size() - 4) == ".bin" ? read_grid_binary(path) : read_grid_csv(path);
    } else {
        std::vector<double> c(std::size_t(M) + 1);
        double fact = 1.0;
        for (int n = 0; n <= M; ++n) {
            if (n > 0) fact *= n;
            c[std::size_t(n)] = std::pow(-sigma, n) / fact;
        }
        if (kind == "power") {
            u = GridFunction::half_line(N, L, [&](double x) { return std::pow(cplx(x), mu) * (1.0 + x) * std::exp(-sigma * x); });
            for (int n = 0; n < M; ++n) exact.push_back((c[std::size_t(n)] + (n > 0 ? c[std::size_t(n) - 1] : 0.0)) * cgamma(mu + double(n) + 1.0));
        } else {
            u = poisson_apply(1.0, mu, 0, sigma, N, L);
            for (int n = 0; n < M; ++n) exact.push_back(c[std::size_t(n)] * cgamma(mu + double(n) + 1.0) * crgamma(mu + 1.0));
        }
    }
    TraceVector t = trace_vector(u, mu, M, sigma, method == "xi" ? TraceMethod::xi : TraceMethod::limit);
    o.results["mu"] = cj(t.mu);
    o.results["values"] = cj(t.values);
    if (!exact.empty()) {
        double err = 0.0;
        for (std::size_t j = 0; j < exact.size(); ++j) err = std::max(err, std::abs(t.values[j] - exact[j]) / std::max(1.0, std::abs(exact[j])));
        o.results["exact"] = cj(exact);
        o.results["max_error"] = err;
        o.verdicts.check("trace error vs closed form", err, method == "xi" ? 1e-3 : 1e-6);
    }
    o.dump = [u](const std::string& path) { dump_grid_file(u, path); };
    return o;
}

inline Outcome cmd_fit_exponent(Params& P) {
    auto input = P.opt_str("input");
    auto alpha = P.opt_real("alpha");
    if (input.has_value() == alpha.has_value()) throw UsageError("fit-exponent needs exactly one of --input and --alpha");
    double perturb = alpha ? P.real("perturb") : 0.0;
    auto N = alpha ? std::size_t(P.integer("N", [](long long n) { return is_pow2(n) && n >= 64 && n <= (1 << 22); }, "must be a power of two >= 64")) : 0;
    std::string ep = P.str("endpoint", {"left", "right", "both"});
    auto d_min = P.opt_real("d-min", positive, "must be positive");
    double d_max = P.real("d-max", positive, "must be positive");
    auto expect = P.opt_real("expect");
    double expect_tol = P.real("expect-tol", positive, "must be positive");
    Outcome o;
    std::vector<double> x, u;
    if (input) {
        auto [xs, ys] = read_csv_columns(*input);
        x = xs;
        for (auto z : ys) u.push_back(z.real());
    } else {
        double h = 2.0 / double(N);
        for (std::size_t i = 1; i < N; ++i) {
            double xi = -1.0 + double(i) * h, d = 1.0 - std::abs(xi);
            x.push_back(xi);
            u.push_back(std::pow(d, *alpha) * (1.0 + perturb * d));
        }
    }
    Endpoint side = ep == "left" ? Endpoint::left : ep == "right" ? Endpoint::right : Endpoint::both;
    ExponentFit f = fit_boundary_exponent(x, u, side, d_min ? *d_min : -1.0, d_max);
    o.results["fit"] = exponent_json(f);
    if (alpha) o.verdicts.check("|alpha_hat - alpha|", std::abs(f.alpha_hat - *alpha), perturb == 0.0 ? 1e-3 : 0.05);
    if (expect) o.verdicts.check("|alpha_hat - expect|", std::abs(f.alpha_hat - *expect), expect_tol);
    return o;
}

inline Outcome cmd_suite(Params& P) {
    int jobs = int(P.integer("jobs", [](long long n) { return n >= 1 && n <= 64; }, "must lie in 1..64"));
    auto all = suite::criteria();
    std::vector<int> ids;
    if (auto only = P.opt_str("only")) {
        std::stringstream ss(*only);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            char* end = nullptr;
            long v = std::strtol(tok.c_str(), &end, 10);
            if (tok.empty() || *end != '\0' || v < 1 || v > long(all.size())) throw UsageError("--only takes criterion ids 1.." + std::to_string(all.size()));
            ids.push_back(int(v));
        }
    } else {
        for (std::size_t i = 0; i < all.size(); ++i) ids.push_back(int(i) + 1);
    }
    std::vector<CriterionResult> res(ids.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < ids.size();) res[k] = suite::run_timed(all[std::size_t(ids[k] - 1)], ids[k]);
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::min<int>(jobs, int(ids.size())); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    Outcome o;
    json list = json::array();
    for (const auto& r : res) {
        json ms = json::array();
        for (const auto& m : r.metrics) ms.push_back(json{{"name", m.name}, {"value", m.value}, {"tolerance", m.tolerance}, {"passed", m.passed()}});
        json c{{"id", r.id}, {"title", r.title}, {"budget_seconds", r.budget}, {"metrics", ms}};
        if (!r.error.empty()) c["error"] = r.error;
        list.push_back(c);
        o.verdicts.flag("criterion " + std::to_string(r.id), r.passed());
        o.timings["criterion_" + std::to_string(r.id) + "_seconds"] = r.seconds;
    }
    o.results["criteria"] = list;
    return o;
}

}  // namespace detail

/// Runs one command. Usage and module errors give exit code 1, tolerance failures 2.
inline Report run(const RunConfig& cfg) {
    Report rep;
    rep.doc["schema_version"] = schema_version;
    rep.doc["command"] = cfg.command;
    auto t0 = std::chrono::steady_clock::now();
    std::optional<detail::Params> P;
    try {
        P.emplace(cfg);
        static const std::map<std::string, std::function<detail::Outcome(detail::Params&)>> dispatch{
            {"check", detail::cmd_check},
            {"index", detail::cmd_index},
            {"factorize", detail::cmd_factorize},
            {"solve-halfline", detail::cmd_solve_halfline},
            {"solve-interval", detail::cmd_solve_interval},
            {"trace", detail::cmd_trace},
            {"fit-exponent", detail::cmd_fit_exponent},
            {"suite", detail::cmd_suite},
        };
        detail::Outcome o = dispatch.at(cfg.command)(*P);
        rep.doc["inputs"] = P->inputs();
        rep.doc["results"] = o.results;
        rep.doc["verdicts"] = o.verdicts.to_json();
        o.timings["total_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.doc["timings"] = o.timings;
        rep.exit_code = o.verdicts.passed() ? 0 : 2;
        rep.dump = o.dump;
    } catch (const UsageError& e) {
        rep.doc["inputs"] = P ? P->inputs() : json::object();
        rep.doc["error"] = json{{"kind", "usage"}, {"module", "cli"}, {"op", cfg.command}, {"message", e.what()}};
        rep.exit_code = 1;
    } catch (const Error& e) {
        rep.doc["inputs"] = P ? P->inputs() : json::object();
        rep.doc["error"] = json{{"kind", "module"}, {"module", e.module()}, {"op", e.op()}, {"message", e.what()}};
        rep.exit_code = 1;
    }
    return rep;
}

/// RunConfig from the command and inputs of an earlier report.
inline RunConfig config_from_report(const json& doc) {
    if (!doc.contains("command") || !doc["command"].is_string()) throw UsageError("report has no command");
    RunConfig c;
    c.command = doc["command"].get<std::string>();
    command_params(c.command);
    if (doc.contains("inputs"))
        for (auto it = doc["inputs"].begin(); it != doc["inputs"].end(); ++it) {
            const json& v = it.value();
            std::string s;
            if (v.is_string()) s = v.get<std::string>();
            else if (v.is_number_integer()) s = std::to_string(v.get<long long>());
            else if (v.is_number()) s = mutrans::detail::fmt17(v.get<double>());
            else if (v.is_object() && v.contains("re") && v.contains("im")) {
                double re = v["re"].get<double>(), im = v["im"].get<double>();
                s = "(" + mutrans::detail::fmt17(re) + ")+(" + mutrans::detail::fmt17(im) + ")*i";
            } else {
                throw UsageError("cannot replay input " + it.key());
            }
            c.params[it.key()] = s;
        }
    return c;
}

}  // namespace mutrans::cli
