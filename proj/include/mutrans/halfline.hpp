#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fit.hpp"
#include "fourierops.hpp"
#include "muspace.hpp"
#include "special.hpp"
#include "symcore.hpp"
#include "wienerhopf.hpp"

namespace mutrans {

/// Constant-coefficient model at one tangential mode sigma.
struct ModelProblem {
    BoundarySymbol symbol;
    cplx m = 0.0;
    cplx mu0 = 0.0;
    double sigma = 1.0;
    std::size_t N = 1u << 14;
    double L = 20.48;
    std::size_t wh_modes = 256;
    double residual_lo = 0.5;       // residual window [residual_lo, L * residual_hi_frac]
    double residual_hi_frac = 0.5;
    double fit_lo_h = 20.0;         // exponent fit window [fit_lo_h * h, fit_hi]
    double fit_hi = 0.02;
};

/// Problem with mu0 taken from the factorization index of p at sigma.
inline ModelProblem make_problem(const BoundarySymbol& p, double sigma, std::size_t N, double L) {
    ModelProblem pr;
    pr.symbol = p;
    pr.m = p.order_m;
    pr.sigma = sigma;
    pr.N = N;
    pr.L = L;
    IndexReport ix = factorization_index(p, sigma);
    pr.mu0 = ix.mu0;
    return pr;
}

struct ExponentFitResult {
    double alpha_hat = 0.0;
    double fit_residual = 0.0;
};

struct SolveReport {
    GridFunction u;
    double residual = 0.0;
    TraceVector traces;
    ExponentFitResult exponent_fit;
    std::string method;
    bool converged = true;
    double residual_lo = 0.0, residual_hi = 0.0;
};

/// Slope of log|u| against log x on nodes with x in [lo, hi]; u must not change sign there.
inline ExponentFitResult fit_exponent_halfline(const GridFunction& u, double lo, double hi) {
    std::vector<double> lx, ly;
    cplx ref = 0.0;
    for (std::size_t k = u.k0() + 1; k < u.size(); ++k) {
        double x = u.x(k);
        if (x < lo) continue;
        if (x > hi) break;
        if (ref == cplx(0.0)) ref = u[k];
        if (std::abs(u[k]) == 0.0 || std::real(u[k] * std::conj(ref)) <= 0.0)
            throw Error("halfline", "fit_exponent", "exponent fit invalid across zeros");
        lx.push_back(std::log(x));
        ly.push_back(std::log(std::abs(u[k])));
    }
    LineFit f = linefit(lx, ly);
    return {f.slope, f.max_dev};
}

namespace detail {

inline MultiplierSpec symbol_multiplier(const ModelProblem& pr) {
    BoundarySymbol p = pr.symbol;
    double s = pr.sigma;
    return {[p, s](double xi) { return p.eval(s, xi); }, pr.m, Side::whole, "P"};
}

struct Normalized {
    bool identity = false;
    WienerHopfFactors factors;
    std::function<cplx(double)> q;
};

inline Normalized normalized_factors(const ModelProblem& pr) {
    Normalized n;
    BoundarySymbol p = pr.symbol;
    cplx mu0 = pr.mu0, m = pr.m;
    double s = pr.sigma;
    n.q = [p, mu0, m, s](double xi) { return p.eval(s, xi) * std::pow(cplx(s, -xi), mu0 - m) * std::pow(cplx(s, xi), -mu0); };
    SampledSymbol qs = normalize_symbol(p, mu0, s, pr.wh_modes);
    double dev = 0.0;
    for (auto v : qs.values) dev = std::max(dev, std::abs(v - 1.0));
    n.identity = dev < 1e-13;
    if (!n.identity) n.factors = factorize(qs, n.q);
    return n;
}

// u = Xi_+^{-mu0} e^+ Q~_+ g for reduced data g = r^+ Xi_-^{mu0-m} e^+ f.
inline GridFunction parametrix_from_reduced(const ModelProblem& pr, const Normalized& nf, const GridFunction& g) {
    GridFunction v = nf.identity ? g : invert_truncated(nf.factors, g);
    // x < 0 values are discretization leakage; zeroing them would spoil the discrete inverse
    return xi_plus_apply(-pr.mu0, pr.sigma, v);
}

inline void finish_report(const ModelProblem& pr, SolveReport& r, const GridFunction& Pu_plus, const GridFunction& f) {
    r.residual_lo = pr.residual_lo;
    r.residual_hi = pr.L * pr.residual_hi_frac;
    r.residual = rel_l2(Pu_plus, f, r.residual_lo, r.residual_hi);
    r.converged = r.residual <= 1e-4;
    if (pr.mu0.imag() == 0.0) {
        double h = r.u.h();
        try {
            r.exponent_fit = fit_exponent_halfline(r.u, pr.fit_lo_h * h, pr.fit_hi);
        } catch (const Error&) {
            r.exponent_fit = {NAN, NAN};
        }
    }
}

// 1 on [0, a], 0 beyond b, smooth exponential blend between.
inline double taper(double x, double a, double b) {
    if (x <= a) return 1.0;
    if (x >= b) return 0.0;
    double y = (b - x) / (b - a);
    double ea = std::exp(-1.0 / y), eb = std::exp(-1.0 / (1.0 - y));
    return ea / (ea + eb);
}

// Extension to x < 0 by f(-x) = sum_j c_j f(j x), j = 1..6, matching five derivatives at 0,
// tapered to zero on [-1, -1/2].
inline GridFunction smooth_extension(const GridFunction& f) {
    static const double c[6] = {21.0, -70.0, 105.0, -84.0, 35.0, -6.0};
    GridFunction e = f;
    e.side = Side::whole;
    const std::size_t k0 = f.k0();
    auto val = [&](std::size_t k) { return k0 + k < f.size() ? f[k0 + k] : cplx(0.0); };
    cplx f0 = right_limit(f);
    for (std::size_t k = 1; k <= k0; ++k) {
        double x = double(k) * f.h();
        if (x >= 1.0) break;
        cplx v = 0.0;
        for (int j = 0; j < 6; ++j) v += c[j] * val(std::size_t(j + 1) * k);
        e[k0 - k] = taper(x, 0.5, 1.0) * v;
    }
    e[k0] = f0;
    return e;
}

}  // namespace detail

/// Parametrix solve of r^+ P u = f, u supported in x >= 0:
/// u = Xi_+^{-mu0} e^+ Q~_+ r^+ Xi_-^{mu0-m} e^+ f, Q~_+ the inverse of the truncated normalized symbol.
inline SolveReport solve_homogeneous(const ModelProblem& pr, const GridFunction& f) {
    detail::Normalized nf = detail::normalized_factors(pr);
    GridFunction fe = truncate_restrict(f);
    GridFunction g = truncate_restrict(xi_minus_apply(pr.mu0 - pr.m, pr.sigma, fe));
    SolveReport r;
    r.method = nf.identity ? "parametrix (q = 1)" : "parametrix (Wiener-Hopf)";
    r.u = detail::parametrix_from_reduced(pr, nf, g);
    GridFunction Pu = truncate_restrict(apply_multiplier(detail::symbol_multiplier(pr), r.u));
    detail::finish_report(pr, r, Pu, fe);
    if (pr.mu0.real() > -1) {
        try {
            r.traces = trace_vector(r.u, pr.mu0, 1, pr.sigma);
        } catch (const Error&) {
            r.traces = {pr.mu0, 0, {}};
        }
    }
    return r;
}

/// r^+ P u = f with gamma_{mu0-1,0} u = phi: u = K_{mu0-1,0} phi + w.
/// The reduced data of r^+ P K phi is phi r^+ F^{-1}(q - q_inf), q the normalized symbol.
inline SolveReport solve_nonhomogeneous(const ModelProblem& pr, const GridFunction& f, cplx phi) {
    if (!(pr.mu0.real() > 1e-9)) throw Error("halfline", "solve_nonhomogeneous", "needs Re mu0 > 0");
    detail::Normalized nf = detail::normalized_factors(pr);
    GridFunction fe = truncate_restrict(f);
    GridFunction g = truncate_restrict(xi_minus_apply(pr.mu0 - pr.m, pr.sigma, fe));
    if (!nf.identity && phi != cplx(0.0)) {
        cplx qinf = 0.5 * (nf.q(1e12) + nf.q(-1e12));
        auto qf = nf.q;
        GridFunction delta(pr.N, pr.L, Side::whole);
        delta[delta.k0()] = 1.0 / delta.h();
        GridFunction kq = apply_multiplier({[qf, qinf](double xi) { return qf(xi) - qinf; }, 0.0, Side::whole, "q-q_inf"}, delta);
        g = g - phi * truncate_restrict(kq);
        g.side = Side::nonneg;
    }
    SolveReport r;
    r.method = "parametrix + Poisson";
    GridFunction w = detail::parametrix_from_reduced(pr, nf, g);
    GridFunction z = poisson_apply(phi, pr.mu0 - 1.0, 0, pr.sigma, pr.N, pr.L);
    r.u = z + w;
    r.u.side = Side::nonneg;

    // r^+ P z = phi r^+ F^{-1}((sigma - i xi)^{m-mu0} q); the q_inf part is carried by x <= 0
    GridFunction Pz(pr.N, pr.L, Side::nonneg);
    if (!nf.identity) {
        cplx qinf = 0.5 * (nf.q(1e12) + nf.q(-1e12));
        auto qf = nf.q;
        cplx e = pr.m - pr.mu0;
        double s = pr.sigma;
        GridFunction delta(pr.N, pr.L, Side::whole);
        delta[delta.k0()] = phi / delta.h();
        Pz = truncate_restrict(apply_multiplier(
            {[qf, qinf, e, s](double xi) { return std::pow(cplx(s, -xi), e) * (qf(xi) - qinf); }, e - 1.0, Side::whole, "PK"}, delta));
    }
    GridFunction Pw = apply_multiplier(detail::symbol_multiplier(pr), w);
    GridFunction Pu = Pz + truncate_restrict(Pw);
    detail::finish_report(pr, r, Pu, fe);
    try {
        r.traces = trace_vector(r.u, pr.mu0 - 1.0, 1, pr.sigma);
    } catch (const Error&) {
        r.traces = {pr.mu0 - 1.0, 0, {}};
    }
    return r;
}

struct TransmissionMappingResult {
    double score = 0.0;     // boundary second-difference size over its interior median
    bool smooth = false;    // C^1-extendable by the threshold rule
    bool inconclusive = false;
    std::string note;
};

/// g = r^+ P e^+ x^mu v; smooth iff max |one-sided second difference at scale 8h| on [0, 32h]
/// stays within 10x its median on [1/4, 1].
inline TransmissionMappingResult transmission_mapping_test(const ModelProblem& pr, cplx mu, const std::function<double(double)>& v_profile) {
    if (!(mu.real() > -1)) throw Error("halfline", "transmission_mapping_test", "needs Re mu > -1");
    TransmissionMappingResult res;
    // P = Xi_-^{m-mu} R Xi_+^mu with R of order 0. r^+ Xi_-^{m-mu} only sees x > 0, so it is applied
    // to a smooth extension of r^+ R Xi_+^mu u instead of the zero extension.
    const double s = pr.sigma;
    // v e^{sigma x} = sum_k t_k x^k + O(x^K); Xi_+^mu maps x^{mu+k} e^{-sigma x} to Gamma(mu+k+1)/k! x^k e^{-sigma x}
    const int K = 6;
    std::vector<double> xs;
    std::vector<cplx> ys;
    for (int i = 0; i < 64; ++i) {
        double x = 0.25 * (1 - std::cos(pi * (i + 0.5) / 64));
        xs.push_back(x);
        ys.push_back(v_profile(x) * std::exp(s * x));
    }
    std::vector<cplx> t = polyfit(xs, ys, 12).coef;
    auto head = [&](double x) {
        cplx a = 0.0;
        for (int k = K - 1; k >= 0; --k) a = a * x + t[std::size_t(k)];
        return a * std::exp(-s * x);
    };
    // Xi_+^mu is causal, so cutting the data beyond x = 2 leaves w exact on [0, 2]
    GridFunction rem = GridFunction::half_line(pr.N, pr.L, [&](double x) {
        return x > 0 ? detail::taper(x, 2.0, 4.0) * std::pow(cplx(x), mu) * (v_profile(x) - head(x)) : cplx(0.0);
    });
    GridFunction w = truncate_restrict(xi_plus_apply(mu, s, rem));
    for (std::size_t k = w.k0(); k < w.size(); ++k) {
        double x = w.x(k);
        cplx a = 0.0, fk = 1.0;
        for (int j = 0; j < K; ++j) {
            if (j > 0) fk *= double(j);
            a += t[std::size_t(j)] * cgamma(mu + double(j) + 1.0) / fk * std::pow(x, j);
        }
        w[k] = detail::taper(x, 2.0, 4.0) * (w[k] + (k == w.k0() ? 0.5 : 1.0) * a * std::exp(-s * x));
    }
    BoundarySymbol p = pr.symbol;
    cplx m = pr.m;
    MultiplierSpec R{[p, s, m, mu](double xi) { return p.eval(s, xi) * std::pow(cplx(s, -xi), mu - m) * std::pow(cplx(s, xi), -mu); }, 0.0,
                     Side::whole, "R"};
    GridFunction g = detail::smooth_extension(truncate_restrict(apply_multiplier(R, w)));
    g = truncate_restrict(xi_minus_apply(m - mu, s, g));
    const std::size_t H = 8, k0 = g.k0();
    auto d2 = [&](std::size_t k) { return std::abs(g[k] - 2.0 * g[k + H] + g[k + 2 * H]); };
    double bmax = 0.0;
    for (std::size_t k = k0 + 1; k <= k0 + 4 * H; ++k) bmax = std::max(bmax, d2(k));
    std::vector<double> inner;
    for (std::size_t k = k0 + 1; k + 2 * H < g.size(); ++k) {
        double x = g.x(k);
        if (x < 0.25) continue;
        if (x > 1.0) break;
        inner.push_back(d2(k));
    }
    if (inner.empty()) {
        res.inconclusive = true;
        res.note = "grid too coarse for the interior window";
        return res;
    }
    std::nth_element(inner.begin(), inner.begin() + long(inner.size() / 2), inner.end());
    double med = inner[inner.size() / 2];
    if (!(med > 0) || !std::isfinite(bmax)) {
        res.inconclusive = true;
        res.note = "degenerate second differences";
        return res;
    }
    res.score = bmax / med;
    res.smooth = res.score <= 10.0;
    return res;
}

/// Mu-norm stability check for the solution of a homogeneous solve.
inline MuNorm solution_mu_norm(const SolveReport& r, cplx mu0, double s, double sigma) { return mu_norm(r.u, mu0, s, sigma); }

}  // namespace mutrans
