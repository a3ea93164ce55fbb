#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fft.hpp"
#include "special.hpp"

namespace mutrans {

enum class Side { whole, nonneg, nonpos };

inline const char* side_name(Side s) {
    switch (s) {
        case Side::nonneg: return "nonneg";
        case Side::nonpos: return "nonpos";
        default: return "whole";
    }
}

/// Complex samples on x_k = -L + k h, h = 2L/N, N a power of two; x = 0 sits at k0 = N/2.
struct GridFunction {
    std::vector<cplx> values;
    double L = 1.0;
    Side side = Side::whole;
    double leakage = 0.0;

    GridFunction() = default;
    GridFunction(std::size_t n, double half_length, Side s = Side::whole)
        : values(n, cplx(0.0)), L(half_length), side(s) {
        if (n < 4 || (n & (n - 1)) != 0) throw Error("fourierops", "GridFunction", "N must be a power of two >= 4, got " + std::to_string(n));
        if (!(half_length > 0)) throw Error("fourierops", "GridFunction", "L must be positive");
    }

    std::size_t size() const { return values.size(); }
    double h() const { return 2.0 * L / double(values.size()); }
    double x(std::size_t k) const { return -L + double(k) * h(); }
    std::size_t k0() const { return values.size() / 2; }
    cplx& operator[](std::size_t k) { return values[k]; }
    const cplx& operator[](std::size_t k) const { return values[k]; }

    /// Samples f on the whole grid.
    template <class F>
    static GridFunction sample(std::size_t n, double half_length, F&& f) {
        GridFunction g(n, half_length, Side::whole);
        for (std::size_t k = 0; k < n; ++k) g[k] = f(g.x(k));
        return g;
    }

    /// e^+ of half-line data: f on x > 0, zero on x < 0, half of f(0+) at x = 0.
    template <class F>
    static GridFunction half_line(std::size_t n, double half_length, F&& f) {
        GridFunction g(n, half_length, Side::nonneg);
        for (std::size_t k = g.k0() + 1; k < n; ++k) g[k] = f(g.x(k));
        cplx f0 = f(0.0);
        g[g.k0()] = std::isfinite(std::abs(f0)) ? 0.5 * f0 : cplx(0.0);
        return g;
    }
};

inline GridFunction operator+(GridFunction a, const GridFunction& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
    if (a.side != b.side) a.side = Side::whole;
    return a;
}

inline GridFunction operator-(GridFunction a, const GridFunction& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
    if (a.side != b.side) a.side = Side::whole;
    return a;
}

inline GridFunction operator*(cplx c, GridFunction a) {
    for (auto& v : a.values) v *= c;
    return a;
}

/// Discrete L2 norm h * sum |f|^2 over k in [k_lo, k_hi).
inline double l2_norm(const GridFunction& f, std::size_t k_lo = 0, std::size_t k_hi = std::size_t(-1)) {
    k_hi = std::min(k_hi, f.size());
    double s = 0.0;
    for (std::size_t k = k_lo; k < k_hi; ++k) s += std::norm(f[k]);
    return std::sqrt(s * f.h());
}

/// Relative L2 distance ||a - b|| / ||b|| over the nodes with x in [x_lo, x_hi].
inline double rel_l2(const GridFunction& a, const GridFunction& b, double x_lo = -INFINITY, double x_hi = INFINITY) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double x = a.x(k);
        if (x < x_lo || x > x_hi) continue;
        num += std::norm(a[k] - b[k]);
        den += std::norm(b[k]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Relative L2 mass of f on the side opposite to `side`.
inline double support_leakage(const GridFunction& f, Side side) {
    if (side == Side::whole) return 0.0;
    double out = 0.0, tot = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        double m = std::norm(f[k]);
        tot += m;
        if (k == f.k0()) continue;
        bool neg = k < f.k0();
        if ((side == Side::nonneg && neg) || (side == Side::nonpos && !neg)) out += m;
    }
    return tot > 0 ? std::sqrt(out / tot) : 0.0;
}

/// Discrete frequency for DFT index j: pi j / L with j folded into [-N/2, N/2).
inline double frequency(std::size_t j, std::size_t n, double L) {
    long long jj = (j < n / 2) ? (long long)j : (long long)j - (long long)n;
    return pi * double(jj) / L;
}

/// Fourier multiplier xi -> eval(xi) with its order and analyticity class.
struct MultiplierSpec {
    std::function<cplx(double)> eval;
    cplx order = 0.0;
    Side side = Side::whole;  // nonneg: plus symbol, nonpos: minus symbol
    std::string label;
};

/// (sigma + i xi)^mu, principal branch.
inline MultiplierSpec chi_plus(cplx mu, double sigma) {
    return {[mu, sigma](double xi) { return std::pow(cplx(sigma, xi), mu); }, mu, Side::nonneg, "chi_plus"};
}

/// (sigma - i xi)^mu, principal branch.
inline MultiplierSpec chi_minus(cplx mu, double sigma) {
    return {[mu, sigma](double xi) { return std::pow(cplx(sigma, -xi), mu); }, mu, Side::nonpos, "chi_minus"};
}

/// Lattice transform of the sampled kernel I^{nu-1}(x) e^{-sigma x}, x = h, 2h, ... (real nu > 0).
/// Equals (sigma + i xi)^{-nu} plus the aliasing sum, via the Hurwitz-Lerch expansion
/// sum_{k>=1} (kh)^{nu-1} e^{-wk} = Gamma(nu) w^{-nu} + sum_j zeta(1-nu-j) (-w)^j / j!, |w| < 2 pi.
inline MultiplierSpec chi_plus_lattice(double nu, double sigma, double h) {
    if (!(nu > 0)) throw Error("fourierops", "chi_plus_lattice", "order must be positive");
    std::vector<double> coef;
    double fact = 1.0;
    for (int j = 0; j < 100; ++j) {
        if (j > 0) fact *= double(j);
        double s = 1.0 - nu - double(j);
        coef.push_back(zeta(s) / fact);
    }
    double pref = std::pow(h, nu) / std::tgamma(nu);
    return {[nu, sigma, h, coef, pref](double xi) {
                cplx w = cplx(sigma, xi) * h;
                if (std::abs(w) >= 2 * pi) throw Error("fourierops", "chi_plus_lattice", "frequency outside lattice series range");
                cplx s = 0.0, p = 1.0;
                for (double c : coef) {
                    s += c * p;
                    p *= -w;
                }
                return std::pow(cplx(sigma, xi), -nu) + pref * s;
            },
            -nu, Side::nonneg, "chi_plus_lattice"};
}

/// One-sided lattice form of (sigma - i xi)^{-nu}, nu > 0: the kernel I^{nu-1}(-x) e^{sigma x} sampled at
/// x = -h, -2h, ... with lag-0 weight -zeta(1-nu) h^nu / Gamma(nu) (the trapezoid weight h/2 at nu = 1).
inline MultiplierSpec chi_minus_lattice(double nu, double sigma, double h) {
    MultiplierSpec p = chi_plus_lattice(nu, sigma, h);
    double w0 = -zeta(1.0 - nu) * std::pow(h, nu) / std::tgamma(nu);
    return {[p, w0](double xi) { return p.eval(-xi) + w0; }, -nu, Side::nonpos, "chi_minus_lattice"};
}

/// F^{-1}(spec(xi) F f) with F f = int e^{-i x xi} f dx on the periodic box.
inline GridFunction apply_multiplier(const MultiplierSpec& spec, const GridFunction& f) {
    std::size_t n = f.size();
    std::vector<cplx> v = f.values;
    detail::dft(v, FFTW_FORWARD);
    for (std::size_t j = 0; j < n; ++j) {
        double xi = frequency(j, n, f.L);
        cplx m = spec.eval(xi);
        if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
            throw Error("fourierops", "apply_multiplier", "non-finite multiplier value at xi_j = " + std::to_string(xi));
        v[j] *= m;
    }
    detail::dft(v, FFTW_BACKWARD);
    GridFunction out(n, f.L, Side::whole);
    double inv = 1.0 / double(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = v[k] * inv;
    if (spec.side != Side::whole && spec.side == f.side) {
        out.side = f.side;
        out.leakage = support_leakage(out, out.side);
    }
    return out;
}

inline GridFunction xi_plus_apply(cplx mu, double sigma, const GridFunction& f) {
    if (mu == cplx(0.0)) return f;
    return apply_multiplier(chi_plus(mu, sigma), f);
}

inline GridFunction xi_minus_apply(cplx mu, double sigma, const GridFunction& f) {
    if (mu == cplx(0.0)) return f;
    return apply_multiplier(chi_minus(mu, sigma), f);
}

/// Right limit at x = 0 from the three nodes after k0 (quadratic extrapolation).
inline cplx right_limit(const GridFunction& f) {
    std::size_t k = f.k0();
    return 3.0 * f[k + 1] - 3.0 * f[k + 2] + f[k + 3];
}

/// e^+ r^+: zero on x < 0. Data not already supported on x >= 0 gets the midpoint value at x = 0.
inline GridFunction truncate_restrict(const GridFunction& f) {
    GridFunction g = f;
    for (std::size_t k = 0; k < g.k0(); ++k) g[k] = 0.0;
    if (f.side != Side::nonneg) g[g.k0()] = 0.5 * right_limit(f);
    g.side = Side::nonneg;
    g.leakage = 0.0;
    return g;
}

struct MinusTruncatedResult {
    GridFunction value;          // r^+ Xi_-^mu of the zero extension
    double discrepancy = 0.0;    // relative L2 gap to the even-reflection route on x > 0
    bool both_valid = false;     // both extensions lie in the admissible Sobolev range
};

/// r^+ Xi_-^mu l f for half-line data f, comparing zero extension against even reflection.
inline MinusTruncatedResult minus_truncated_apply(cplx mu, double sigma, const GridFunction& f, double tol = 1e-6) {
    GridFunction zero_ext = truncate_restrict(f);
    GridFunction refl = zero_ext;
    std::size_t k0 = refl.k0();
    for (std::size_t k = 1; k < k0; ++k) refl[k0 - k] = refl[k0 + k];
    refl[k0] = 2.0 * zero_ext[k0];
    refl[0] = 0.0;
    refl.side = Side::whole;

    // negative real orders use the one-sided lattice kernel, so values on x > 0 see only data on x > 0
    auto op = [&](const GridFunction& g) {
        if (mu.imag() == 0.0 && mu.real() < 0.0) return apply_multiplier(chi_minus_lattice(-mu.real(), sigma, f.h()), g);
        return xi_minus_apply(mu, sigma, g);
    };
    MinusTruncatedResult r;
    r.value = truncate_restrict(op(zero_ext));
    GridFunction alt = truncate_restrict(op(refl));
    r.discrepancy = rel_l2(alt, r.value, f.h(), INFINITY);
    // zero extension lies in H^{1/2-}, the reflection in H^{3/2-}
    r.both_valid = mu.real() < 0.5;
    if (r.both_valid && r.discrepancy > tol)
        throw Error("fourierops", "minus_truncated_apply", "extension dependence detected - check mu, smoothness");
    return r;
}

/// <f, g> = h sum f conj(g).
inline cplx inner(const GridFunction& f, const GridFunction& g) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += f[k] * std::conj(g[k]);
    return s * f.h();
}

/// Discrete Sobolev norm with weight <xi>^s.
inline double sobolev_norm(const GridFunction& f, double s) {
    std::vector<cplx> v = f.values;
    detail::dft(v, FFTW_FORWARD);
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        double xi = frequency(j, v.size(), f.L);
        acc += std::pow(1.0 + xi * xi, s) * std::norm(v[j]);
    }
    double h = f.h();
    return std::sqrt(acc * h * h / (2.0 * f.L));
}

}  // namespace mutrans
