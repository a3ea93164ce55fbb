#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fourierops.hpp"
#include "fracdomain.hpp"
#include "halfline.hpp"
#include "muspace.hpp"
#include "symcore.hpp"
#include "wienerhopf.hpp"

namespace mutrans {

struct Metric {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool upper = true;  // value <= tolerance passes; otherwise value >= tolerance
    bool passed() const { return upper ? value <= tolerance : value >= tolerance; }
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Metric> metrics;
    double seconds = 0.0;
    double budget = 0.0;
    std::string error;
    bool passed() const {
        if (!error.empty() || seconds > budget) return false;
        for (const auto& m : metrics)
            if (!m.passed()) return false;
        return true;
    }
};

namespace suite {

inline double tol_scale() {
    const char* s = std::getenv("MUTRANS_TOL_SCALE");
    if (!s) return 1.0;
    double v = std::atof(s);
    return v > 0 ? v : 1.0;
}

inline void add(CriterionResult& r, std::string name, double value, double tol) { r.metrics.push_back({std::move(name), value, tol * tol_scale(), true}); }

inline CriterionResult transmission_index() {
    CriterionResult r{1, "transmission and factorization index of (sigma^2 + xi^2)^a", {}, 0, 1.0, {}};
    for (double a : {0.25, 0.5, 0.75, 1.3}) {
        BoundarySymbol p = abs2pow(a);
        TransmissionReport t = check_mu_transmission(p, a, 3, 1e-8);
        add(r, "transmission residual a=" + std::to_string(a), t.max_residual, 1e-8);
        IndexReport ix = factorization_index(p, 1.0);
        add(r, "|mu0 - a| a=" + std::to_string(a), std::abs(ix.mu0 - a), 1e-6);
    }
    return r;
}

inline CriterionResult wiener_hopf() {
    CriterionResult r{2, "Wiener-Hopf factorization", {}, 0, 2.0, {}};
    auto qr = [](double x) { return cplx((1 + x * x) / (4 + x * x)); };
    WienerHopfFactors f = factorize(sample_on(CompactifiedGrid(256, 1.0), qr), qr);
    add(r, "rational reconstruction", f.recon_residual, 1e-10);
    add(r, "rational analyticity leakage", f.support_leakage, 1e-10);
    double dev = 0.0;
    for (double x : {-50.0, -3.0, -0.5, 0.0, 0.7, 2.0, 40.0}) dev = std::max(dev, std::abs(f.plus_at(x) - cplx(1, x) / cplx(2, x)));
    add(r, "rational q+ vs (1+i xi)/(2+i xi)", dev, 1e-10);
    auto qe = [](double x) { return cplx(std::exp(1 / (1 + x * x))); };
    WienerHopfFactors g = factorize(sample_on(CompactifiedGrid(256, 1.0), qe), qe);
    add(r, "exp reconstruction", g.recon_residual, 1e-8);
    dev = 0.0;
    for (double x : {-50.0, -3.0, -0.5, 0.0, 0.7, 2.0, 40.0}) dev = std::max(dev, std::abs(g.plus_at(x) - std::exp(1.0 / (2.0 * I) / cplx(x, -1))));
    add(r, "exp q+ vs closed form", dev, 1e-8);
    GridFunction bump = GridFunction::half_line(1 << 14, 20.48, [](double x) { return std::abs(x - 2) < 1 ? std::exp(-1 / (1 - (x - 2) * (x - 2))) : 0.0; });
    GridFunction out = apply_multiplier(f.plus_multiplier(), bump);
    add(r, "support leakage of OP(q+) e+", support_leakage(out, Side::nonneg), 1e-8);
    return r;
}

inline CriterionResult transform_pair() {
    CriterionResult r{3, "transform pair F^{-1}(sigma + i xi)^{-mu-1} = x^mu e^{-sigma x}/Gamma(mu+1)", {}, 0, 2.0, {}};
    const std::size_t N = 1 << 14;
    const double L = 40.96;
    double worst = 0.0;
    for (double mu : {-0.5, 0.0, 0.5, 1.5})
        for (double s : {0.5, 1.0, 2.0}) {
            GridFunction delta(N, L, Side::nonneg);
            delta[delta.k0()] = 1.0 / delta.h();
            GridFunction k = apply_multiplier(chi_plus_lattice(mu + 1.0, s, delta.h()), delta);
            GridFunction ex = GridFunction::half_line(N, L, [&](double x) { return std::pow(x, mu) * std::exp(-s * x) / std::tgamma(mu + 1); });
            worst = std::max(worst, rel_l2(k, ex, 0.1, L));
        }
    add(r, "max relative L2 on x >= 0.1", worst, 1e-5);
    return r;
}

inline CriterionResult halfline_parametrix() {
    CriterionResult r{4, "half-line parametrix", {}, 0, 10.0, {}};
    const double L = 20.48, sigma = 2.0;
    auto f = [](double x) { return std::exp(-x); };
    {
        ModelProblem pr = make_problem(abs2pow(1.0), sigma, 1 << 19, L);
        SolveReport s = solve_homogeneous(pr, GridFunction::half_line(pr.N, L, f));
        GridFunction ex = GridFunction::half_line(pr.N, L, [](double x) { return (std::exp(-x) - std::exp(-2 * x)) / 3.0; });
        add(r, "a=1 vs exact ODE solution", rel_l2(s.u, ex, 0.0, L), 1e-6);
    }
    {
        ModelProblem pr = make_problem(abs2pow(0.5), sigma, 1 << 16, L);
        SolveReport s = solve_homogeneous(pr, GridFunction::half_line(pr.N, L, f));
        GridFunction ex = GridFunction::half_line(pr.N, L, [&](double x) {
            return std::exp(-x) * std::erf(std::sqrt((sigma - 1) * x)) / std::sqrt(sigma * sigma - 1);
        });
        add(r, "a=1/2 vs exact solution", rel_l2(s.u, ex, 0.0, L), 1e-3);
    }
    for (double a : {1.0, 0.5}) {
        ModelProblem p1 = make_problem(abs2pow(a), sigma, 1 << 17, L), p2 = p1;
        p2.N = 1 << 18;
        double r1 = solve_homogeneous(p1, GridFunction::half_line(p1.N, L, f)).residual;
        double r2 = solve_homogeneous(p2, GridFunction::half_line(p2.N, L, f)).residual;
        add(r, "residual a=" + std::to_string(a) + " N=2^18", r2, 1e-4);
        add(r, "residual ratio N->2N a=" + std::to_string(a), r2 / r1, 0.55);
    }
    return r;
}

inline CriterionResult trace_poisson() {
    CriterionResult r{5, "trace and Poisson algebra", {}, 0, 5.0, {}};
    const std::size_t N = 1 << 14;
    const double L = 20.48, sigma = 1.0;
    for (double mu : {-0.5, 0.3, 1.2}) {
        cplx phi(0.7, -0.2);
        GridFunction k = poisson_apply(phi, mu, 0, sigma, N, L);
        add(r, "|gamma K phi - phi| / |phi| mu=" + std::to_string(mu), std::abs(trace_gamma(k, mu, 0, sigma).value - phi) / std::abs(phi), 1e-6);
    }
    for (double mu : {0.3, -0.4, 1.7}) {
        Eigen::MatrixXcd P = transition_matrix(mu, 2, 1.5);
        double d = std::abs(P(0, 0) - 1.0) + std::abs(P(0, 1)) + std::abs(P(1, 0) - mu * 1.5) + std::abs(P(1, 1) - 1.0);
        add(r, "Phi(M=2) entries mu=" + std::to_string(mu), d, 0.0);
    }
    // M = 3 against numeric traces of the basis I^{mu+k} e^{-sigma x}; derivatives of Xi^mu u from the pair.
    for (double mu : {0.3, 1.2}) {
        Eigen::MatrixXcd G(3, 3), D(3, 3);
        for (int k = 0; k < 3; ++k) {
            GridFunction u = GridFunction::half_line(N, L, [&](double x) { return std::pow(x, mu + k) * std::exp(-sigma * x) / std::tgamma(mu + k + 1); });
            for (int j = 0; j < 3; ++j) {
                G(j, k) = trace_gamma(u, mu, j, sigma).value;
                D(j, k) = j >= k ? binom(double(j), k) * std::pow(-sigma, j - k) : 0.0;
            }
        }
        Eigen::MatrixXcd num = D * G.inverse();
        add(r, "Phi(M=3) vs numeric traces mu=" + std::to_string(mu), (num - transition_matrix(mu, 3, sigma)).cwiseAbs().maxCoeff(), 1e-6);
    }
    return r;
}

inline CriterionResult interval_getoor() {
    CriterionResult r{6, "interval fractional Laplacian", {}, 0, 60.0, {}};
    for (double a : {0.25, 0.5, 0.75}) {
        IntervalOperator op = assemble_fraclap(a, 2048, Construction::box_fft);
        Eigen::VectorXd u(long(op.size()));
        for (std::size_t i = 0; i < op.size(); ++i) u(long(i)) = std::pow(1 - op.x(i) * op.x(i), a);
        Eigen::VectorXd v = op.matrix * u;
        double e = 0.0;
        for (std::size_t i = 0; i < op.size(); ++i)
            if (std::abs(op.x(i)) <= 0.5) e = std::max(e, std::abs(v(long(i)) / getoor_constant(a) - 1.0));
        add(r, "C(a) relative error a=" + std::to_string(a), e, 1e-3);
        IntervalReport s = solve_dirichlet_homogeneous(op, std::vector<double>(op.size(), 1.0));
        add(r, "|alpha - a| left a=" + std::to_string(a), s.fits_valid ? std::abs(s.left.alpha_hat - a) : INFINITY, 0.05);
        add(r, "|alpha - a| right a=" + std::to_string(a), s.fits_valid ? std::abs(s.right.alpha_hat - a) : INFINITY, 0.05);
    }
    return r;
}

inline CriterionResult interval_nonhomogeneous() {
    CriterionResult r{7, "nonhomogeneous interval problem a = 1/2", {}, 0, 60.0, {}};
    IntervalOperator op = assemble_fraclap(0.5, 4096, Construction::box_fft);
    IntervalReport s = solve_dirichlet_nonhomogeneous(op, std::vector<double>(op.size(), 0.0), 1.0, 1.0);
    add(r, "|alpha + 0.5| left", s.fits_valid ? std::abs(s.left.alpha_hat + 0.5) : INFINITY, 0.05);
    add(r, "|alpha + 0.5| right", s.fits_valid ? std::abs(s.right.alpha_hat + 0.5) : INFINITY, 0.05);
    add(r, "trace recovery left", std::abs(s.trace_left - 1.0), 5e-2);
    add(r, "trace recovery right", std::abs(s.trace_right - 1.0), 5e-2);
    return r;
}

inline CriterionResult variable_power() {
    CriterionResult r{8, "variable-coefficient power A^0.7, A = -d^2 + 1 + x^2/2", {}, 0, 120.0, {}};
    IntervalOperator op = fracpow_variable([](double x) { return 1.0 + 0.5 * x * x; }, 0.7, 2048);
    IntervalReport s = solve_dirichlet_homogeneous(op, std::vector<double>(op.size(), 1.0));
    add(r, "|alpha - 0.7| left", s.fits_valid ? std::abs(s.left.alpha_hat - 0.7) : INFINITY, 0.05);
    add(r, "|alpha - 0.7| right", s.fits_valid ? std::abs(s.right.alpha_hat - 0.7) : INFINITY, 0.05);
    return r;
}

inline CriterionResult properties() {
    CriterionResult r{9, "module invariants", {}, 0, 300.0, {}};
    const std::size_t N = 1 << 14;
    const double L = 20.48;
    auto bump = [](double c, double w) {
        return [c, w](double x) { return std::abs(x - c) < w ? std::exp(-1 / (1 - (x - c) * (x - c) / (w * w))) : 0.0; };
    };
    GridFunction b = GridFunction::half_line(N, L, bump(3.0, 2.0));
    add(r, "support preservation Xi_+^{1/2}", support_leakage(xi_plus_apply(0.5, 1.0, b), Side::nonneg), 1e-8);
    GridFunction bm = GridFunction::sample(N, L, bump(-3.0, 2.0));
    add(r, "support preservation Xi_-^{1/2}", support_leakage(xi_minus_apply(0.5, 1.0, bm), Side::nonpos), 1e-8);
    GridFunction g = GridFunction::sample(N, L, [](double x) { return std::exp(-x * x) * (1 + 0.3 * x); });
    add(r, "composition Xi^0.3 Xi^0.4 = Xi^0.7",
        rel_l2(xi_plus_apply(0.3, 1.0, xi_plus_apply(0.4, 1.0, g)), xi_plus_apply(0.7, 1.0, g)), 1e-9);
    GridFunction g2 = GridFunction::sample(N, L, [](double x) { return std::exp(-(x - 1) * (x - 1)); });
    cplx mu(0.4, 0.3);
    cplx lhs = inner(xi_plus_apply(mu, 1.0, g), g2), rhs = inner(g, xi_minus_apply(std::conj(mu), 1.0, g2));
    add(r, "adjoint identity", std::abs(lhs - rhs) / std::abs(lhs), 1e-9);
    GridFunction u = GridFunction::half_line(N, L, [](double x) { return std::pow(x, 0.6) * std::exp(-x); });
    double ratio = mu_norm(u, -0.4, 0.2, 1.0).value / mu_norm(u, 0.6, 0.2, 1.0).value;
    add(r, "embedding norm ratio (logged constant <= 10)", ratio, 10.0);
    GridFunction w = GridFunction::half_line(N, L, [](double x) { return std::pow(x, 0.3) * (1 + x + 0.5 * x * x) * std::exp(-x); });
    Decomposition d = decompose(w, 0.3, 2, 1.0);
    double kern = 0.0;
    for (auto v : d.w_traces.values) kern = std::max(kern, std::abs(v));
    add(r, "kernel of the trace map", kern, 1e-5);
    double agree = 0.0;
    for (int j = 0; j < 2; ++j) {
        cplx a = trace_gamma(w, 0.3, j, 1.0).value, b = trace_gamma(w, 0.3, j, 1.0, TraceMethod::xi).value;
        agree = std::max(agree, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    add(r, "trace methods limit vs xi", agree, 1e-3);
    double cong = 0.0;
    for (double a : {0.25, 0.5, 0.75, 1.3}) {
        cplx m0 = factorization_index(abs2pow(a) * chiplus(0.2), 1.0).mu0;
        double frac = (m0 - (a + 0.2)).real();
        cong = std::max(cong, std::abs(frac - std::round(frac)) + std::abs(m0.imag()));
    }
    add(r, "mu0 = mu mod 1", cong, 1e-6);
    cplx s1 = factorization_index(abs2pow(0.4), 1.0).mu0, s2 = factorization_index(scaled(abs2pow(0.4), cplx(-2.0, 3.0)), 1.0).mu0;
    add(r, "index invariant under scaling", std::abs(s1 - s2), 1e-10);
    TransmissionReport pc = check_mu_transmission(abs2pow(0.3) * chiplus(0.45), 0.75, 3, 1e-8);
    add(r, "product closure residual", pc.max_residual, 1e-8);
    return r;
}

inline std::vector<std::function<CriterionResult()>> criteria() {
    return {transmission_index, wiener_hopf, transform_pair, halfline_parametrix, trace_poisson,
            interval_getoor,   interval_nonhomogeneous, variable_power, properties};
}

inline CriterionResult run_timed(const std::function<CriterionResult()>& f, int id) {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = f();
    } catch (const std::exception& e) {
        r.id = id;
        r.title = "criterion " + std::to_string(id);
        r.budget = 1.0;
        r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace suite

}  // namespace mutrans
