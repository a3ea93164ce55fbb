#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fft.hpp"
#include "fourierops.hpp"
#include "special.hpp"
#include "symcore.hpp"

namespace mutrans {

/// n points z_k = exp(i theta_k), theta_k = 2 pi (k + 1/2) / n, paired with xi_k = c i (1+z)/(1-z) = -c cot(theta_k/2).
struct CompactifiedGrid {
    std::size_t n_modes = 0;
    double scale = 1.0;

    CompactifiedGrid() = default;
    CompactifiedGrid(std::size_t n, double c) : n_modes(n), scale(c) {
        if (n < 8 || (n & (n - 1)) != 0) throw Error("wienerhopf", "CompactifiedGrid", "n_modes must be a power of two >= 8");
        if (!(c > 0)) throw Error("wienerhopf", "CompactifiedGrid", "scale must be positive");
    }

    double theta(std::size_t k) const { return 2 * pi * (double(k) + 0.5) / double(n_modes); }
    cplx z(std::size_t k) const { return std::polar(1.0, theta(k)); }
    double xi(std::size_t k) const { return -scale / std::tan(0.5 * theta(k)); }
    cplx z_of(double x) const { return cplx(x, -scale) / cplx(x, scale); }
    double xi_of(cplx zz) const { return (scale * I * (1.0 + zz) / (1.0 - zz)).real(); }
};

/// Samples of a function on a compactified grid.
struct SampledSymbol {
    CompactifiedGrid grid;
    std::vector<cplx> values;
};

template <class F>
SampledSymbol sample_on(const CompactifiedGrid& g, F&& f) {
    SampledSymbol s{g, std::vector<cplx>(g.n_modes)};
    for (std::size_t k = 0; k < g.n_modes; ++k) s.values[k] = f(g.xi(k));
    return s;
}

/// Finite Laurent series sum_m c_m z^m, m in [lo, lo + coef.size()).
struct Laurent {
    int lo = 0;
    std::vector<cplx> coef;

    cplx operator()(cplx z) const {
        if (coef.empty()) return 0.0;
        // Horner in z from the top, then shift by z^lo
        cplx s = 0.0;
        for (std::size_t i = coef.size(); i-- > 0;) s = s * z + coef[i];
        return s * std::pow(z, lo);
    }
    cplx at_one() const {
        cplx s = 0.0;
        for (auto c : coef) s += c;
        return s;
    }
};

namespace detail {

// Laurent coefficients c_m, m = -n/2..n/2-1, of circle samples on the half-shifted grid.
inline Laurent circle_coefficients(const std::vector<cplx>& v) {
    std::size_t n = v.size();
    std::vector<cplx> w = v;
    dft(w, FFTW_FORWARD);
    Laurent L;
    L.lo = -int(n / 2);
    L.coef.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        int m = L.lo + int(i);
        std::size_t j = std::size_t((m + int(n)) % int(n));
        L.coef[i] = w[j] / double(n) * std::polar(1.0, -pi * double(m) / double(n));
    }
    return L;
}

inline std::vector<cplx> eval_on(const Laurent& L, const CompactifiedGrid& g) {
    std::vector<cplx> out(g.n_modes);
    for (std::size_t k = 0; k < g.n_modes; ++k) out[k] = L(g.z(k));
    return out;
}

inline Laurent trim(Laurent L, double rel = 1e-18) {
    double mx = 0.0;
    for (auto c : L.coef) mx = std::max(mx, std::abs(c));
    std::size_t a = 0, b = L.coef.size();
    while (a < b && std::abs(L.coef[a]) <= rel * mx) ++a;
    while (b > a && std::abs(L.coef[b - 1]) <= rel * mx) --b;
    Laurent r;
    r.lo = L.lo + int(a);
    r.coef.assign(L.coef.begin() + long(a), L.coef.begin() + long(b));
    return r;
}

}  // namespace detail

/// Winding number of nonvanishing samples by summing principal argument increments.
inline int winding_number(const std::vector<cplx>& v) {
    double acc = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) acc += std::arg(v[(k + 1) % v.size()] / v[k]);
    return int(std::lround(acc / (2 * pi)));
}

struct CauchySplit {
    SampledSymbol plus, minus;
    Laurent plus_series, minus_series;
    cplx mean = 0.0;
    double tail_mass = 0.0;
    std::string warning;
};

/// h = h_plus + h_minus. The plus part (analytic in Im xi < 0, i.e. outside the disk) keeps the
/// negative circle indices, the minus part the positive ones; the mean is split evenly.
inline CauchySplit cauchy_split(const SampledSymbol& h, double tail_tol = 1e-8) {
    std::size_t n = h.grid.n_modes;
    Laurent c = detail::circle_coefficients(h.values);
    CauchySplit r;
    r.plus.grid = r.minus.grid = h.grid;
    Laurent p, m;
    p.lo = c.lo;
    p.coef.assign(c.coef.size(), 0.0);
    m = p;
    double tot = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < c.coef.size(); ++i) {
        int idx = c.lo + int(i);
        double w = std::norm(c.coef[i]);
        tot += w;
        if (std::abs(idx) >= int(n / 4)) tail += w;
        if (idx < 0) p.coef[i] = c.coef[i];
        else if (idx > 0) m.coef[i] = c.coef[i];
        else {
            p.coef[i] = 0.5 * c.coef[i];
            m.coef[i] = 0.5 * c.coef[i];
            r.mean = c.coef[i];
        }
    }
    r.tail_mass = tot > 0 ? std::sqrt(tail / tot) : 0.0;
    if (r.tail_mass > tail_tol) r.warning = "h insufficiently smooth on compactification";
    r.plus_series = detail::trim(p);
    r.minus_series = detail::trim(m);
    r.plus.values = detail::eval_on(r.plus_series, h.grid);
    r.minus.values = detail::eval_on(r.minus_series, h.grid);
    return r;
}

/// Factors q = q^- q^+ with q^+(infinity) = 1.
struct WienerHopfFactors {
    CompactifiedGrid grid;
    std::vector<cplx> q_plus, q_minus;
    Laurent log_plus, log_minus;  // log q^+ and log q^- as circle series
    int winding = 0;
    double recon_residual = 0.0;
    double support_leakage = 0.0;
    double tail_mass = 0.0;
    std::string warning;

    cplx plus_at(double xi) const { return std::exp(log_plus(grid.z_of(xi))); }
    cplx minus_at(double xi) const { return std::exp(log_minus(grid.z_of(xi))); }

    MultiplierSpec plus_multiplier(double power = 1.0) const {
        Laurent lp = log_plus;
        CompactifiedGrid g = grid;
        return {[lp, g, power](double xi) { return std::exp(power * lp(g.z_of(xi))); }, 0.0, Side::nonneg, "q_plus"};
    }
    MultiplierSpec minus_multiplier(double power = 1.0) const {
        Laurent lm = log_minus;
        CompactifiedGrid g = grid;
        return {[lm, g, power](double xi) { return std::exp(power * lm(g.z_of(xi))); }, 0.0, Side::nonpos, "q_minus"};
    }

    /// Homogeneous factors p_pm of the symbol that produced q: p_+ = chi_+^{mu0} q^+, p_- = chi_-^{m - mu0} q^-.
    cplx p_plus(double sigma, double xi, cplx mu0) const { return std::pow(cplx(sigma, xi), mu0) * plus_at(xi); }
    cplx p_minus(double sigma, double xi, cplx mu0, cplx m) const { return std::pow(cplx(sigma, -xi), m - mu0) * minus_at(xi); }
};

/// q(xi) = p(sigma, xi) (sigma - i xi)^{mu0 - m} (sigma + i xi)^{-mu0} on a grid with scale sigma.
inline SampledSymbol normalize_symbol(const BoundarySymbol& p, cplx mu0, double sigma, std::size_t n_modes = 256) {
    if (!(sigma > 0)) throw Error("wienerhopf", "normalize_symbol", "sigma must be positive");
    auto q = [&](double xi) {
        return p.eval(sigma, xi) * std::pow(cplx(sigma, -xi), mu0 - p.order_m) * std::pow(cplx(sigma, xi), -mu0);
    };
    SampledSymbol s = sample_on(CompactifiedGrid(n_modes, sigma), q);
    for (auto v : s.values)
        if (!(std::abs(v) > 0) || !std::isfinite(std::abs(v))) throw Error("wienerhopf", "normalize_symbol", "symbol vanishes or is singular on the grid");
    int w = winding_number(s.values);
    for (int refine = 0; refine < 4; ++refine) {
        SampledSymbol f = sample_on(CompactifiedGrid(n_modes << (refine + 1), sigma), q);
        int w2 = winding_number(f.values);
        if (w2 == w) break;
        w = w2;
    }
    if (w != 0) throw Error("wienerhopf", "normalize_symbol", "normalization did not remove winding; check mu0");
    return s;
}

/// Multiplicative split of a winding-zero symbol; q_eval, when given, is used for an off-grid residual.
inline WienerHopfFactors factorize(const SampledSymbol& q, const std::function<cplx(double)>& q_eval = nullptr) {
    std::size_t n = q.grid.n_modes;
    for (std::size_t k = 0; k < n; ++k)
        if (!(std::abs(q.values[k]) > 0) || !std::isfinite(std::abs(q.values[k])))
            throw Error("wienerhopf", "factorize", "zero of q on grid at xi = " + std::to_string(q.grid.xi(k)));
    WienerHopfFactors f;
    f.grid = q.grid;
    f.winding = winding_number(q.values);
    if (f.winding != 0)
        throw Error("wienerhopf", "factorize", "winding " + std::to_string(f.winding) + " != 0; renormalize with normalize_symbol");

    // continuous branch of log q
    SampledSymbol lq{q.grid, std::vector<cplx>(n)};
    double arg = std::arg(q.values[0]);
    lq.values[0] = cplx(std::log(std::abs(q.values[0])), arg);
    for (std::size_t k = 1; k < n; ++k) {
        arg += std::arg(q.values[k] / q.values[k - 1]);
        lq.values[k] = cplx(std::log(std::abs(q.values[k])), arg);
    }
    CauchySplit sp = cauchy_split(lq);
    f.tail_mass = sp.tail_mass;
    f.warning = sp.warning;
    f.log_plus = sp.plus_series;
    f.log_minus = sp.minus_series;

    // fix the constant by q^+(infinity) = 1, i.e. log q^+ = 0 at z = 1
    cplx shift = f.log_plus.at_one();
    auto add_const = [](Laurent& L, cplx c) {
        if (L.coef.empty()) {
            L.lo = 0;
            L.coef = {c};
            return;
        }
        if (L.lo > 0) {
            L.coef.insert(L.coef.begin(), std::size_t(L.lo), cplx(0.0));
            L.lo = 0;
        }
        int top = L.lo + int(L.coef.size()) - 1;
        if (top < 0) {
            L.coef.resize(L.coef.size() + std::size_t(-top), cplx(0.0));
        }
        L.coef[std::size_t(-L.lo)] += c;
    };
    add_const(f.log_plus, -shift);
    add_const(f.log_minus, shift);

    f.q_plus.resize(n);
    f.q_minus.resize(n);
    double recon = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cplx z = q.grid.z(k);
        f.q_plus[k] = std::exp(f.log_plus(z));
        f.q_minus[k] = std::exp(f.log_minus(z));
        recon = std::max(recon, std::abs(q.values[k] - f.q_plus[k] * f.q_minus[k]));
    }
    if (q_eval) {
        for (std::size_t k = 1; k < 4 * n; ++k) {
            cplx z = std::polar(1.0, 2 * pi * double(k) / double(4 * n));
            double xi = q.grid.xi_of(z);
            recon = std::max(recon, std::abs(q_eval(xi) - std::exp(f.log_plus(z) + f.log_minus(z))));
        }
    }
    f.recon_residual = recon;

    // analyticity proxy: wrong-side circle mass of log q^+ (positive indices) and log q^- (negative)
    auto wrong_side = [&](const std::vector<cplx>& vals, bool plus) {
        std::vector<cplx> lv(n);
        double a = std::arg(vals[0]);
        lv[0] = cplx(std::log(std::abs(vals[0])), a);
        for (std::size_t k = 1; k < n; ++k) {
            a += std::arg(vals[k] / vals[k - 1]);
            lv[k] = cplx(std::log(std::abs(vals[k])), a);
        }
        Laurent c = detail::circle_coefficients(lv);
        double bad = 0.0, tot = 0.0;
        for (std::size_t i = 0; i < c.coef.size(); ++i) {
            int m = c.lo + int(i);
            double w = std::norm(c.coef[i]);
            tot += w;
            if ((plus && m > 0) || (!plus && m < 0)) bad += w;
        }
        return tot > 0 ? std::sqrt(bad / tot) : 0.0;
    };
    f.support_leakage = std::max(wrong_side(f.q_plus, true), wrong_side(f.q_minus, false));
    return f;
}

/// r^+ OP(q) e^+ g.
inline GridFunction apply_truncated(const MultiplierSpec& q, const GridFunction& g) {
    return truncate_restrict(apply_multiplier(q, truncate_restrict(g)));
}

/// r^+ OP(1/q^+) e^+ r^+ OP(1/q^-) e^+ g, the inverse of the truncated operator q_+.
inline GridFunction invert_truncated(const WienerHopfFactors& f, const GridFunction& g) {
    if (g.side != Side::nonneg && support_leakage(g, Side::nonneg) > 1e-12)
        throw Error("wienerhopf", "invert_truncated", "g must be supported on x >= 0");
    GridFunction w = apply_truncated(f.minus_multiplier(-1.0), g);
    return apply_truncated(f.plus_multiplier(-1.0), w);
}

/// CSV rows xi, Re q+, Im q+, Re q-, Im q-.
inline std::string factors_csv(const WienerHopfFactors& f) {
    std::string s = "xi,re_qplus,im_qplus,re_qminus,im_qminus\n";
    char buf[160];
    for (std::size_t k = 0; k < f.grid.n_modes; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", f.grid.xi(k), f.q_plus[k].real(), f.q_plus[k].imag(),
                      f.q_minus[k].real(), f.q_minus[k].imag());
        s += buf;
    }
    return s;
}

}  // namespace mutrans
