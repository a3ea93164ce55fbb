#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "special.hpp"
#include "symexpr.hpp"

namespace mutrans {

/// Principal symbol p(sigma, xi) of complex order m at a boundary point.
struct BoundarySymbol {
    cplx order_m = 0.0;
    std::function<cplx(double, double)> eval;
    std::function<cplx(int, double, double)> deriv_xi;  // optional closed-form d^k/dxi^k
    std::string label;
    SymExprPtr expr;                                     // set when built from an expression
};

/// Symbol from an expression tree; derivatives come from exact Taylor jets.
inline BoundarySymbol make_symbol(SymExprPtr e, std::optional<cplx> order = std::nullopt) {
    BoundarySymbol p;
    auto deg = e->degree();
    if (order) p.order_m = *order;
    else if (deg) p.order_m = *deg;
    else throw Error("symcore", "make_symbol", "cannot infer the order of " + e->str() + "; supply order=");
    p.eval = [e](double s, double x) { return e->eval(s, x); };
    p.deriv_xi = [e](int k, double s, double x) { return e->jet(s, x, std::size_t(k)).derivative(std::size_t(k)); };
    p.label = e->str();
    p.expr = e;
    return p;
}

inline BoundarySymbol abs2pow(cplx a) { return make_symbol(SymExpr::builtin(SymExpr::Kind::abs2pow, a)); }
inline BoundarySymbol chiplus(cplx nu) { return make_symbol(SymExpr::builtin(SymExpr::Kind::chiplus, nu)); }
inline BoundarySymbol chiminus(cplx nu) { return make_symbol(SymExpr::builtin(SymExpr::Kind::chiminus, nu)); }

/// Product of symbols; orders add.
inline BoundarySymbol operator*(const BoundarySymbol& p, const BoundarySymbol& q) {
    if (p.expr && q.expr) return make_symbol(SymExpr::binary(SymExpr::Kind::mul, p.expr, q.expr), p.order_m + q.order_m);
    BoundarySymbol r;
    r.order_m = p.order_m + q.order_m;
    r.eval = [p, q](double s, double x) { return p.eval(s, x) * q.eval(s, x); };
    if (p.deriv_xi && q.deriv_xi)
        r.deriv_xi = [p, q](int k, double s, double x) {
            cplx acc = 0.0;
            for (int j = 0; j <= k; ++j) acc += binom(double(k), j) * p.deriv_xi(j, s, x) * q.deriv_xi(k - j, s, x);
            return acc;
        };
    r.label = "(" + p.label + ")*(" + q.label + ")";
    return r;
}

/// Symbol scaled by a nonzero constant.
inline BoundarySymbol scaled(const BoundarySymbol& p, cplx c) {
    if (p.expr) return make_symbol(SymExpr::binary(SymExpr::Kind::mul, SymExpr::constant(c), p.expr), p.order_m);
    BoundarySymbol r = p;
    r.eval = [p, c](double s, double x) { return c * p.eval(s, x); };
    if (p.deriv_xi) r.deriv_xi = [p, c](int k, double s, double x) { return c * p.deriv_xi(k, s, x); };
    return r;
}

/// max over samples of |p(t sigma, t xi) - t^m p(sigma, xi)| / |t^m p(sigma, xi)|, t in {1/2, 2, 5}.
inline double check_homogeneity(const BoundarySymbol& p, int samples) {
    if (samples < 1) throw Error("symcore", "check_homogeneity", "samples must be positive");
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        double th = -pi / 2 + pi * (i + 0.5) / samples;
        double s = std::cos(th), x = std::sin(th);
        cplx base = p.eval(s, x);
        if (!std::isfinite(std::abs(base)))
            throw Error("symcore", "check_homogeneity", "evaluation failed at (sigma, xi) = (" + std::to_string(s) + ", " + std::to_string(x) + ")");
        for (double t : {0.5, 2.0, 5.0}) {
            cplx scaled_v = p.eval(t * s, t * x);
            if (!std::isfinite(std::abs(scaled_v)))
                throw Error("symcore", "check_homogeneity", "evaluation failed at (sigma, xi) = (" + std::to_string(t * s) + ", " + std::to_string(t * x) + ")");
            cplx ref = std::exp(p.order_m * std::log(t)) * base;
            double den = std::abs(ref);
            worst = std::max(worst, std::abs(scaled_v - ref) / (den > 0 ? den : 1.0));
        }
    }
    return worst;
}

/// True when p does not vanish on the sampled closed unit half-circle sigma >= 0.
inline bool is_elliptic(const BoundarySymbol& p, int samples = 256) {
    for (int i = 0; i <= samples; ++i) {
        double th = -pi / 2 + pi * i / samples;
        double s = std::max(0.0, std::cos(th)), x = std::sin(th);
        cplx v = p.eval(s, x);
        if (!std::isfinite(std::abs(v)) || std::abs(v) < 1e-13) return false;
    }
    return true;
}

struct TransmissionSample {
    double sigma;
    int k;
    double residual;
};

struct TransmissionReport {
    cplx mu = 0.0;
    double max_residual = 0.0;
    std::vector<TransmissionSample> per_sample;
    bool passed = false;
    double tolerance = 0.0;
    bool closed_form = true;
    double extrapolation_residual = 0.0;  // relative to |p(0, +-1)|
};

namespace detail {

// k-th xi-derivative by central differences with one Richardson step.
inline cplx fd_derivative(const BoundarySymbol& p, int k, double s, double x) {
    if (k == 0) return p.eval(s, x);
    double h = (k == 1) ? 1e-4 : (k == 2 ? 1e-3 : 1e-2);
    auto diff = [&](double hh) {
        cplx acc = 0.0;
        for (int j = 0; j <= k; ++j) {
            double off = (double(j) - 0.5 * k) * hh;
            acc += ((k - j) % 2 ? -1.0 : 1.0) * binom(double(k), j) * p.eval(s, x + off);
        }
        return acc / std::pow(hh, k);
    };
    return (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
}

// d^k p(sigma, xi) at sigma = 0; falls back to extrapolation from small sigma.
inline cplx boundary_derivative(const BoundarySymbol& p, int k, double x, bool closed, double& extrap_res) {
    auto d = [&](double s) { return closed ? p.deriv_xi(k, s, x) : fd_derivative(p, k, s, x); };
    cplx v = d(0.0);
    if (std::isfinite(std::abs(v))) return v;
    double s1 = 1e-3, s2 = 5e-4, s3 = 2.5e-4;
    cplx f1 = d(s1), f2 = d(s2), f3 = d(s3);
    // quadratic extrapolation to sigma = 0 through the three samples
    cplx e = f1 * (s2 * s3) / ((s1 - s2) * (s1 - s3)) + f2 * (s1 * s3) / ((s2 - s1) * (s2 - s3)) + f3 * (s1 * s2) / ((s3 - s1) * (s3 - s2));
    cplx lin = 2.0 * f3 - f2;
    extrap_res = std::max(extrap_res, std::abs(e - lin));
    return e;
}

}  // namespace detail

/// Principal-term check |d^k p(0,-1) - e^{i pi (m - 2 mu - k)} d^k p(0,+1)| / scale for k = 0..max_deriv.
inline TransmissionReport check_mu_transmission(const BoundarySymbol& p, cplx mu, int max_deriv, double tol = -1.0) {
    TransmissionReport r;
    r.mu = mu;
    r.closed_form = bool(p.deriv_xi);
    r.tolerance = tol > 0 ? tol : (r.closed_form ? 1e-8 : 1e-4);
    double ex = 0.0;
    cplx pp = detail::boundary_derivative(p, 0, 1.0, r.closed_form, ex);
    cplx pm = detail::boundary_derivative(p, 0, -1.0, r.closed_form, ex);
    if (!(std::abs(pp) > 1e-13) || !(std::abs(pm) > 1e-13) || !std::isfinite(std::abs(pp)) || !std::isfinite(std::abs(pm)))
        throw Error("symcore", "check_mu_transmission", "transmission check undefined at characteristic boundary point");
    for (int k = 0; k <= max_deriv; ++k) {
        cplx dm = detail::boundary_derivative(p, k, -1.0, r.closed_form, ex);
        cplx dp = detail::boundary_derivative(p, k, 1.0, r.closed_form, ex);
        cplx phase = std::exp(I * pi * (p.order_m - 2.0 * mu - double(k)));
        double scale = std::max({std::abs(dm), std::abs(dp), std::abs(pp)});
        double res = std::abs(dm - phase * dp) / scale;
        r.per_sample.push_back({0.0, k, res});
        r.max_residual = std::max(r.max_residual, res);
    }
    r.extrapolation_residual = ex / std::max(std::abs(pp), std::abs(pm));
    r.passed = r.max_residual <= r.tolerance;
    return r;
}

struct IndexReport {
    cplx mu0 = 0.0;
    double winding = 0.0;
    cplx a_plus = 0.0, a_minus = 0.0;
    double path_radius = 0.0;
    double mod1 = 0.0;            // Re mu0 reduced to [0, 1)
    double limit_change = 0.0;    // gap between successive extrapolated limits
    std::string warning;
};

namespace detail {

struct PathLog {
    cplx log_plus, log_minus;
    double arg_change;
};

// Continuous branch of log p(sigma, tau) from tau = +T (principal) down to tau = -T.
inline PathLog track_log(const BoundarySymbol& p, cplx m, double sigma, double T) {
    const double th0 = std::atan2(T, sigma);
    const int n0 = 2048;
    auto at = [&](double th) {
        double tau = sigma * std::tan(th);
        cplx v = p.eval(sigma, tau);
        double mag = std::pow(std::hypot(sigma, tau), m.real());
        if (!std::isfinite(std::abs(v)) || std::abs(v) <= 1e-14 * mag)
            throw Error("symcore", "factorization_index", "symbol not elliptic on factorization path");
        return v;
    };
    cplx v = at(th0);
    double arg = std::arg(v);
    double start_arg = arg;
    std::function<void(double, double, cplx, int)> step = [&](double a, double b, cplx va, int depth) {
        cplx vb = at(b);
        double d = std::arg(vb / va);
        if (std::abs(d) >= pi / 2 && depth < 48) {
            double mid = 0.5 * (a + b);
            cplx vm = at(mid);
            step(a, mid, va, depth + 1);
            step(mid, b, vm, depth + 1);
            return;
        }
        arg += d;
    };
    double dth = 2 * th0 / n0;
    cplx prev = v;
    for (int i = 0; i < n0; ++i) {
        double a = th0 - i * dth, b = th0 - (i + 1) * dth;
        step(a, b, prev, 0);
        prev = at(b);
    }
    PathLog r;
    r.log_plus = cplx(std::log(std::abs(v)), start_arg);
    r.log_minus = cplx(std::log(std::abs(prev)), arg);
    r.arg_change = arg - start_arg;
    return r;
}

}  // namespace detail

/// mu0 = m/2 + (a_+ - a_-)/(2 pi i) with a_pm = lim log p(sigma, +-T) - m log|(sigma, T)|.
inline IndexReport factorization_index(const BoundarySymbol& p, double sigma, double T = -1.0, double tol = 1e-6) {
    if (!(sigma > 0)) throw Error("symcore", "factorization_index", "sigma must be positive");
    if (!(T > 0)) T = 1e4 * sigma;
    cplx m = p.order_m;
    std::vector<cplx> ap, am;
    double winding = 0.0;
    for (int i = 0; i < 3; ++i) {
        double Ti = T * std::pow(2.0, i);
        auto pl = detail::track_log(p, m, sigma, Ti);
        double lr = std::log(std::hypot(sigma, Ti));
        ap.push_back(pl.log_plus - m * lr);
        am.push_back(pl.log_minus - m * lr);
        if (i == 0) winding = pl.arg_change / (2 * pi);
    }
    // a(T) = a + c/T + ..., first-order Richardson on (T, 2T) and (2T, 4T)
    cplx ap1 = 2.0 * ap[1] - ap[0], ap2 = 2.0 * ap[2] - ap[1];
    cplx am1 = 2.0 * am[1] - am[0], am2 = 2.0 * am[2] - am[1];
    IndexReport r;
    r.a_plus = ap2;
    r.a_minus = am2;
    r.path_radius = T;
    r.winding = winding;
    r.mu0 = m / 2.0 + (r.a_plus - r.a_minus) / (2.0 * pi * I);
    r.mod1 = r.mu0.real() - std::floor(r.mu0.real());
    r.limit_change = std::max(std::abs(ap2 - ap1), std::abs(am2 - am1));
    if (r.limit_change > tol) r.warning = "limit of a_pm not converged at T = " + std::to_string(T);
    return r;
}

}  // namespace mutrans
