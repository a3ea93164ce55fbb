#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fit.hpp"
#include "fourierops.hpp"
#include "special.hpp"

namespace mutrans {

struct MuNorm {
    cplx mu = 0.0;
    double s = 0.0;
    double value = 0.0;
    double plus_part_norm = 0.0;  // weighted norm of e^+ r^+ Xi_+^mu u
};

/// ||u||_{mu(s)} at mode sigma: the <xi>^{s - Re mu} weighted norm of e^+ r^+ Xi_+^mu u.
inline MuNorm mu_norm(const GridFunction& u, cplx mu, double s, double sigma) {
    if (!(s > mu.real() - 0.5))
        throw Error("muspace", "mu_norm", "requires s > Re mu - 1/2 (got s = " + std::to_string(s) + ", Re mu = " + std::to_string(mu.real()) + ")");
    GridFunction v = truncate_restrict(xi_plus_apply(mu, sigma, u));
    MuNorm r;
    r.mu = mu;
    r.s = s;
    r.plus_part_norm = sobolev_norm(v, s - mu.real());
    r.value = r.plus_part_norm;
    return r;
}

struct TraceVector {
    cplx mu = 0.0;
    int M = 0;
    std::vector<cplx> values;
};

enum class TraceMethod { limit, xi };

struct TraceResult {
    cplx value = 0.0;
    double fit_residual = 0.0;
};

/// Phi_{jk} = binom(mu, j-k) sigma^{j-k}: maps (gamma_{mu,k} u)_k to (d^k/dx^k Xi_+^mu u at 0+)_j.
inline Eigen::MatrixXcd transition_matrix(cplx mu, int M, double sigma) {
    if (M < 1) throw Error("muspace", "transition_matrix", "M must be >= 1");
    // coefficients of (1 + t)^mu from c_0 = 1, c_{n+1} = c_n (mu - n)/(n + 1)
    std::vector<cplx> c(std::size_t(M), 0.0);
    c[0] = 1.0;
    for (int n = 0; n + 1 < M; ++n) c[std::size_t(n + 1)] = c[std::size_t(n)] * (mu - double(n)) / double(n + 1);
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(M, M);
    for (int j = 0; j < M; ++j)
        for (int k = 0; k <= j; ++k) P(j, k) = c[std::size_t(j - k)] * std::pow(sigma, j - k);
    return P;
}

/// c_{mu,j} = i^j / Gamma(mu + j + 1), so that K_{mu,j} = OP((sigma+i xi)^{-mu}) e^+ K_j with
/// K_j = F^{-1} i^j (sigma + i xi)^{-j-1}.
inline cplx poisson_constant(cplx mu, int j) { return std::pow(I, j) * crgamma(mu + double(j) + 1.0); }

/// K_{mu,j} phi = c_{mu,j} x^{mu+j} e^{-sigma x} phi on x > 0.
inline GridFunction poisson_apply(cplx phi, cplx mu, int j, double sigma, std::size_t N, double L) {
    if (!(mu.real() > -1)) throw Error("muspace", "poisson_apply", "needs Re mu > -1");
    if (!(sigma > 0)) throw Error("muspace", "poisson_apply", "sigma must be positive");
    cplx c = poisson_constant(mu, j) * phi;
    cplx e = mu + double(j);
    GridFunction g(N, L, Side::nonneg);
    for (std::size_t k = g.k0() + 1; k < N; ++k) {
        double x = g.x(k);
        g[k] = c * std::pow(x, e) * std::exp(-sigma * x);
    }
    if (std::abs(e) == 0.0) g[g.k0()] = 0.5 * c;
    return g;
}

struct TraceOptions {
    double window_lo = 4.0;   // in units of h
    double window_hi = 40.0;  // in units of h
    double xi_window_hi = 200.0;
    int degree = 5;
    double max_fit_residual = 1e-3;
    double xi_max_fit_residual = 1e-3;
};

namespace detail {

inline PolyFit boundary_fit(const GridFunction& u, cplx mu, const TraceOptions& o, int degree, bool weight_by_power) {
    std::vector<double> xs;
    std::vector<cplx> ys;
    double h = u.h();
    for (std::size_t k = u.k0() + 1; k < u.size(); ++k) {
        double x = u.x(k);
        if (x < o.window_lo * h * (1 - 1e-12)) continue;
        if (x > o.window_hi * h * (1 + 1e-12)) break;
        xs.push_back(x);
        ys.push_back(weight_by_power ? u[k] * std::pow(x, -mu) : u[k]);
    }
    return polyfit(xs, ys, degree);
}

/// Xi_+^mu u = e^{-sigma x} D^mu (e^{sigma x} u) at x_i = i h, i = 1..n, for u supported in x >= 0.
/// D^mu uses the fractional BDF-5 weights (coefficients of delta(z)^mu, delta(z) = sum_{m<=5} (1-z)^m / m)
/// with starting weights on nodes 1..6 that make it exact on x^{mu+q}, q = 0..5. Node 0 is not used.
inline std::vector<cplx> xi_plus_near_boundary(const GridFunction& u, cplx mu, double sigma, int n) {
    constexpr int p = 5, K = 6;
    const double h = u.h();
    if (u.k0() + std::size_t(n) >= u.size()) throw Error("muspace", "trace_gamma", "trace window exceeds the grid");
    std::vector<double> a(p + 1, 0.0);
    for (int m = 1; m <= p; ++m) {
        double c = 1.0;
        for (int k = 0; k <= m; ++k) {
            a[std::size_t(k)] += c / double(m);
            c *= -double(m - k) / double(k + 1);
        }
    }
    std::vector<cplx> w(std::size_t(n) + 1);
    w[0] = std::pow(cplx(a[0]), mu);
    for (int i = 1; i <= n; ++i) {
        cplx s = 0.0;
        for (int k = 1; k <= std::min(i, p); ++k) s += ((mu + 1.0) * double(k) - double(i)) * a[std::size_t(k)] * w[std::size_t(i - k)];
        w[std::size_t(i)] = s / (double(i) * a[0]);
    }
    Eigen::MatrixXcd pw(K, n + 1);
    for (int q = 0; q < K; ++q)
        for (int m = 1; m <= n; ++m) pw(q, m) = std::pow(cplx(double(m)), mu + double(q));
    Eigen::MatrixXcd V = pw.block(0, 1, K, K);
    auto lu = V.partialPivLu();
    std::vector<cplx> f(std::size_t(n) + 1, 0.0);
    for (int m = 1; m <= n; ++m) f[std::size_t(m)] = std::exp(sigma * double(m) * h) * u[u.k0() + std::size_t(m)];
    std::vector<cplx> out(std::size_t(n) + 1, 0.0);
    const cplx scale = std::pow(cplx(h), -mu);
    for (int i = 1; i <= n; ++i) {
        Eigen::VectorXcd r(K);
        for (int q = 0; q < K; ++q) {
            cplx b = mu + double(q), s = 0.0;
            for (int m = 1; m <= i; ++m) s += w[std::size_t(i - m)] * pw(q, m);
            r(q) = cgamma(b + 1.0) * crgamma(b + 1.0 - mu) * std::pow(cplx(double(i)), b - mu) - s;
        }
        Eigen::VectorXcd c = lu.solve(r);
        cplx s = 0.0;
        for (int m = 1; m <= i; ++m) s += w[std::size_t(i - m)] * f[std::size_t(m)];
        for (int j = 1; j <= K; ++j) s += c(j - 1) * f[std::size_t(j)];
        out[std::size_t(i)] = std::exp(-sigma * double(i) * h) * scale * s;
    }
    return out;
}

}  // namespace detail

/// gamma_{mu,j} u: the coefficient of I^{mu+j} = x^{mu+j}/Gamma(mu+j+1) in the boundary expansion of u.
inline TraceResult trace_gamma(const GridFunction& u, cplx mu, int j, double sigma, TraceMethod method = TraceMethod::limit,
                               const TraceOptions& o = {}) {
    if (!(mu.real() > -1)) throw Error("muspace", "trace_gamma", "traces need Re mu > -1");
    if (j < 0) throw Error("muspace", "trace_gamma", "index must be nonnegative");
    int deg = std::max(o.degree, j + 5);
    TraceResult r;
    if (method == TraceMethod::limit) {
        // x^{-mu} u = sum_i gamma_i x^i / Gamma(mu + i + 1)
        PolyFit f = detail::boundary_fit(u, mu, o, deg, true);
        r.value = f.coef[std::size_t(j)] * cgamma(mu + double(j) + 1.0);
        r.fit_residual = f.residual;
    } else {
        // derivatives of Xi_+^mu u at 0+ from a fit on [window_lo h, xi_window_hi h], then Phi^{-1}
        int n = int(o.xi_window_hi);
        std::vector<cplx> w = detail::xi_plus_near_boundary(u, mu, sigma, n);
        std::vector<double> xs;
        std::vector<cplx> ys;
        for (int i = int(std::ceil(o.window_lo)); i <= n; ++i) {
            xs.push_back(double(i) * u.h());
            ys.push_back(w[std::size_t(i)]);
        }
        PolyFit f = polyfit(xs, ys, deg + 1);
        Eigen::VectorXcd d(j + 1);
        double fact = 1.0;
        for (int i = 0; i <= j; ++i) {
            if (i > 0) fact *= double(i);
            d(i) = f.coef[std::size_t(i)] * fact;
        }
        Eigen::MatrixXcd P = transition_matrix(mu, j + 1, sigma);
        Eigen::VectorXcd g = P.triangularView<Eigen::Lower>().solve(d);
        r.value = g(j);
        r.fit_residual = f.residual;
    }
    double tol = method == TraceMethod::limit ? o.max_fit_residual : o.xi_max_fit_residual;
    if (r.fit_residual > tol) throw Error("muspace", "trace_gamma", "trace ill-defined at this resolution");
    return r;
}

inline TraceVector trace_vector(const GridFunction& u, cplx mu, int M, double sigma, TraceMethod method = TraceMethod::limit,
                                const TraceOptions& o = {}) {
    TraceVector t;
    t.mu = mu;
    t.M = M;
    for (int j = 0; j < M; ++j) t.values.push_back(trace_gamma(u, mu, j, sigma, method, o).value);
    return t;
}

struct Decomposition {
    GridFunction v, w;
    TraceVector traces;      // traces of u
    std::vector<cplx> phi;   // Poisson data used for v
    TraceVector w_traces;
};

/// u = v + w with v = sum_j K_{mu,j} phi_j, phi chosen so that gamma_{mu,j} w = 0 for j < M.
inline Decomposition decompose(const GridFunction& u, cplx mu, int M, double sigma, const TraceOptions& o = {}) {
    if (M < 1) throw Error("muspace", "decompose", "M must be >= 1");
    Decomposition d;
    d.traces = trace_vector(u, mu, M, sigma, TraceMethod::limit, o);
    // gamma_{mu,i} K_{mu,j} 1 = i^j (-sigma)^{i-j} Gamma(mu+i+1) / ((i-j)! Gamma(mu+j+1)), i >= j
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(M, M);
    for (int i = 0; i < M; ++i) {
        double f = 1.0;
        for (int j = i; j >= 0; --j) {
            if (i - j > 0) f *= double(i - j);
            T(i, j) = std::pow(I, j) * std::pow(-sigma, i - j) / f * cgamma(mu + double(i) + 1.0) * crgamma(mu + double(j) + 1.0);
        }
    }
    Eigen::VectorXcd g(M);
    for (int i = 0; i < M; ++i) g(i) = d.traces.values[std::size_t(i)];
    Eigen::VectorXcd phi = T.triangularView<Eigen::Lower>().solve(g);
    d.v = GridFunction(u.size(), u.L, Side::nonneg);
    for (int j = 0; j < M; ++j) {
        d.phi.push_back(phi(j));
        d.v = d.v + poisson_apply(phi(j), mu, j, sigma, u.size(), u.L);
    }
    d.v.side = Side::nonneg;
    d.w = u - d.v;
    d.w.side = u.side;
    d.w_traces = trace_vector(d.w, mu, M, sigma, TraceMethod::limit, o);
    return d;
}

}  // namespace mutrans
