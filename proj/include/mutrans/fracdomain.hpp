#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "fft.hpp"
#include "fit.hpp"
#include "fourierops.hpp"
#include "special.hpp"

namespace mutrans {

enum class Construction { box_fft, eigen_power };

inline const char* construction_name(Construction c) { return c == Construction::box_fft ? "box_fft" : "eigen_power"; }

/// r^+ P_a e^+ on the interior nodes x_k = -1 + k h, k = 1..N-1, h = 2/N.
struct IntervalOperator {
    double a = 0.5;
    std::size_t n_basis = 0;  // N; the matrix has N - 1 rows
    Eigen::MatrixXd matrix;
    Construction construction = Construction::box_fft;
    double L_box = 8.0;
    bool fractional_laplacian = true;  // false for powers of -d^2 + c(x) with c not identically 0
    double h() const { return 2.0 / double(n_basis); }
    std::size_t size() const { return n_basis - 1; }
    double x(std::size_t i) const { return -1.0 + double(i + 1) * h(); }
};

namespace detail {

inline std::size_t box_nodes(double L_box, std::size_t N, const char* op) {
    if (N < 64 || (N & (N - 1)) != 0) throw Error("fracdomain", op, "N must be a power of two >= 64");
    double nb = L_box * double(N) / 2.0;
    if (L_box < 1.0 || nb != std::floor(nb)) throw Error("fracdomain", op, "box half-length must align with the interval endpoints on the grid");
    return std::size_t(nb);
}

// Kernel constant of F^{-1}|xi|^{2a}: |d|^{-1-2a} 4^a Gamma(a+1/2) / (sqrt(pi) Gamma(-a)), d != 0.
inline double fraclap_kernel_constant(double a) {
    return std::pow(4.0, a) * std::tgamma(a + 0.5) / std::sqrt(pi) * crgamma(-a).real();
}

// Dense symmetric Toeplitz matrix from its first column.
inline Eigen::MatrixXd toeplitz(const std::vector<double>& t) {
    const std::size_t n = t.size();
    Eigen::MatrixXd M(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) M(long(i), long(j)) = t[i > j ? i - j : j - i];
    return M;
}

// A^a e_j restricted to the interval for A = -D^2 + c on the box with Dirichlet ends, by DST-I.
inline Eigen::MatrixXd dst_power(double a, double c, std::size_t N, double L_box) {
    const std::size_t nb = 2 * box_nodes(L_box, N, "eigen_power") - 1;  // interior box nodes
    const double h = 2.0 / double(N);
    const std::size_t off = box_nodes(L_box, N, "eigen_power") - N / 2;  // box index of x = -1 + h is off
    std::vector<double> lam(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        double s = std::sin(pi * double(k + 1) / (2.0 * double(nb + 1)));
        lam[k] = 4.0 / (h * h) * s * s + c;
        if (!(lam[k] > 0)) throw Error("fracdomain", "eigen_power", "discretization is not positive definite");
        lam[k] = std::pow(lam[k], a) / (2.0 * double(nb + 1));
    }
    const std::size_t n = N - 1;
    Eigen::MatrixXd M(n, n);
    std::vector<double> v(nb);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(v.begin(), v.end(), 0.0);
        v[off + j] = 1.0;
        dst1(v);
        for (std::size_t k = 0; k < nb; ++k) v[k] *= lam[k];
        dst1(v);
        for (std::size_t i = 0; i < n; ++i) M(long(i), long(j)) = v[off + i];
    }
    return 0.5 * (M + M.transpose());
}

// The box power has kernel sum_m K(x - y + 4 L m) - K(x + y - 2 L + 4 L m) far from the diagonal,
// K(d) = kappa |d|^{-1-2a}; subtract every term except K(x - y).
inline void remove_dirichlet_images(Eigen::MatrixXd& M, double a, std::size_t N, double L_box) {
    const double kap = fraclap_kernel_constant(a);
    if (kap == 0.0) return;
    const double h = 2.0 / double(N), P = 4.0 * L_box, s = 1.0 + 2.0 * a, Ps = std::pow(P, -s);
    const std::size_t n = N - 1;
    std::vector<double> diff(n), refl(2 * n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        double d = double(k) * h;
        diff[k] = Ps * (hurwitz_zeta(s, 1.0 + d / P) + hurwitz_zeta(s, 1.0 - d / P));
    }
    for (std::size_t q = 0; q < 2 * n - 1; ++q) {
        double z = -2.0 + double(q + 2) * h - 2.0 * L_box + P;  // x_i + x_j - 2 L mod P, i + j = q
        refl[q] = Ps * (hurwitz_zeta(s, z / P) + hurwitz_zeta(s, 1.0 - z / P));
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) M(long(i), long(j)) += kap * h * (refl[i + j] - diff[i > j ? i - j : j - i]);
}

}  // namespace detail

/// Interval operator for (-Delta)^a. box_fft: lattice multiplier |xi|^{2a} on the box (-L_box, L_box),
/// with the periodic images of the kernel removed by a Hurwitz zeta sum. eigen_power: A^a for the box
/// second-difference matrix, restricted to the interval nodes.
inline IntervalOperator assemble_fraclap(double a, std::size_t N, Construction method, double L_box = 8.0) {
    if (!(a > 0 && a < 2)) throw Error("fracdomain", "assemble_fraclap", "a must lie in (0, 2)");
    IntervalOperator op;
    op.a = a;
    op.n_basis = N;
    op.construction = method;
    op.L_box = L_box;
    if (method == Construction::eigen_power) {
        op.matrix = detail::dst_power(a, 0.0, N, L_box);
        detail::remove_dirichlet_images(op.matrix, a, N, L_box);
        return op;
    }
    const std::size_t nbox = 2 * detail::box_nodes(L_box, N, "assemble_fraclap");
    const double h = 2.0 / double(N), P = 2.0 * L_box, s = 1.0 + 2.0 * a;
    std::vector<cplx> sym(nbox);
    for (std::size_t j = 0; j < nbox; ++j) sym[j] = std::pow(std::abs(frequency(j, nbox, L_box)), 2.0 * a) / double(nbox);
    detail::dft(sym, FFTW_BACKWARD);
    const double kap = detail::fraclap_kernel_constant(a);
    std::vector<double> t(N - 1);
    for (std::size_t k = 0; k + 1 < N; ++k) {
        double d = double(k) * h;
        double img = std::pow(P, -s) * (hurwitz_zeta(s, 1.0 + d / P) + hurwitz_zeta(s, 1.0 - d / P));
        t[k] = sym[k].real() - kap * h * img;
    }
    op.matrix = detail::toeplitz(t);
    return op;
}

/// r^+ A^a e^+ for A = -d^2 + c(x) on (-L_box, L_box) with Dirichlet ends, by eigendecomposition.
inline IntervalOperator fracpow_variable(const std::function<double(double)>& c_profile, double a, std::size_t N, double L_box = 2.0) {
    if (!(a > 0 && a < 2)) throw Error("fracdomain", "fracpow_variable", "a must lie in (0, 2)");
    const std::size_t half = detail::box_nodes(L_box, N, "fracpow_variable");
    const std::size_t nb = 2 * half - 1, off = half - N / 2;
    const double h = 2.0 / double(N);
    IntervalOperator op;
    op.a = a;
    op.n_basis = N;
    op.construction = Construction::eigen_power;
    op.L_box = L_box;
    std::vector<double> d(nb), e(nb - 1);
    double cmin = INFINITY, cmax = -INFINITY;
    for (std::size_t k = 0; k < nb; ++k) {
        double c = c_profile(-L_box + double(k + 1) * h);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
        d[k] = 2.0 / (h * h) + c;
    }
    op.fractional_laplacian = cmax == 0.0 && cmin == 0.0;
    if (cmin == cmax) {
        op.matrix = detail::dst_power(a, cmin, N, L_box);
        return op;
    }
    std::fill(e.begin(), e.end(), -1.0 / (h * h));
    std::vector<double> w(nb), z(nb * nb);
    std::vector<lapack_int> isuppz(2 * nb);
    lapack_int m = 0;
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'A', lapack_int(nb), d.data(), e.data(), 0.0, 0.0, 0, 0, 0.0, &m,
                                     w.data(), z.data(), lapack_int(nb), isuppz.data());
    if (info != 0 || m != lapack_int(nb)) throw Error("fracdomain", "fracpow_variable", "eigendecomposition failed");
    if (!(w[0] > 0)) throw Error("fracdomain", "fracpow_variable", "discretization is not positive definite");
    Eigen::Map<Eigen::MatrixXd> Z(z.data(), long(nb), long(nb));
    Eigen::MatrixXd W = Z.middleRows(long(off), long(N - 1));
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(long(nb));
    for (std::size_t k = 0; k < nb; ++k) lam(long(k)) = std::pow(w[k], a);
    op.matrix = W * lam.asDiagonal() * W.transpose();
    op.matrix = 0.5 * (op.matrix + op.matrix.transpose());
    return op;
}

enum class Endpoint { left, right, both };

struct ExponentFit {
    double alpha_hat = 0.0;
    double d_min = 0.0, d_max = 0.0;
    double fit_residual = 0.0;  // max log-log deviation
    Endpoint side = Endpoint::left;
};

/// Slope of log|u| against log d on d in [d_min, d_max]; d_max defaults to 0.1, d_min to 20 h.
inline ExponentFit fit_boundary_exponent(const std::vector<double>& x, const std::vector<double>& u, Endpoint side, double d_min = -1.0,
                                         double d_max = 0.1) {
    if (x.size() != u.size() || x.size() < 3) throw Error("fracdomain", "fit_boundary_exponent", "need matching data of length >= 3");
    if (d_min < 0) d_min = 20.0 * std::abs(x[1] - x[0]);
    if (!(d_min > 0 && d_max < 0.25 && d_min < d_max)) throw Error("fracdomain", "fit_boundary_exponent", "window must lie strictly inside (0, 0.25)");
    auto one = [&](bool left) {
        std::vector<double> ld, lu;
        double sgn = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = left ? 1.0 + x[i] : 1.0 - x[i];
            if (d < d_min * (1 - 1e-12) || d > d_max * (1 + 1e-12)) continue;
            if (sgn == 0.0) sgn = u[i] > 0 ? 1.0 : -1.0;
            if (u[i] * sgn <= 0) throw Error("fracdomain", "fit_boundary_exponent", "exponent fit invalid across zeros");
            ld.push_back(std::log(d));
            lu.push_back(std::log(std::abs(u[i])));
        }
        return linefit(ld, lu);
    };
    ExponentFit f;
    f.d_min = d_min;
    f.d_max = d_max;
    f.side = side;
    if (side == Endpoint::both) {
        LineFit l = one(true), r = one(false);
        f.alpha_hat = 0.5 * (l.slope + r.slope);
        f.fit_residual = std::max(l.max_dev, r.max_dev);
    } else {
        LineFit l = one(side == Endpoint::left);
        f.alpha_hat = l.slope;
        f.fit_residual = l.max_dev;
    }
    return f;
}

struct IntervalReport {
    std::vector<double> x, u;
    double residual = 0.0;  // relative L2 of r^+ P_a u - f (on |x| <= residual_window for layered solutions)
    double residual_window = 1.0;
    ExponentFit left, right;
    bool fits_valid = true;
    std::string fit_error;
    double trace_left = 0.0, trace_right = 0.0;  // Gamma(a) lim d^{1-a} u, nonhomogeneous solves only
    std::string method;
};

namespace detail {

inline Eigen::VectorXd dense_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& f) {
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() == Eigen::Success) return llt.solve(f);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw Error("fracdomain", "solve", "singular matrix; the operator may have a kernel");
    return lu.solve(f);
}

inline void endpoint_fits(IntervalReport& r, double h) {
    try {
        r.left = fit_boundary_exponent(r.x, r.u, Endpoint::left, 20.0 * h, 0.1);
        r.right = fit_boundary_exponent(r.x, r.u, Endpoint::right, 20.0 * h, 0.1);
    } catch (const Error& e) {
        r.fits_valid = false;
        r.fit_error = e.what();
    }
}

// Integral over [a, b] with panels refined geometrically toward both ends.
template <class F>
double graded_integral(F&& f, double a, double b, const GaussLegendre& gl, int levels = 30) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b), w = 0.5 * (b - a), s = 0.0;
    for (int k = 0; k < levels; ++k) {
        double r0 = w * std::ldexp(1.0, -k - 1), r1 = w * std::ldexp(1.0, -k);
        s += gl.integrate(f, a + r0, a + r1) + gl.integrate(f, b - r1, b - r0);
    }
    return s;
}

inline double blend_cutoff(double t, double d1, double d2) {
    if (t <= d1) return 1.0;
    if (t >= d2) return 0.0;
    double u = (t - d1) / (d2 - d1), A = std::exp(-1.0 / u), B = std::exp(-1.0 / (1.0 - u));
    return B / (A + B);
}

// (-Delta)^a of the boundary layer l(t) = cutoff(t) t^{a-1} (t = distance to the left end), 0 < a < 1.
inline double layer_action(double a, double dx, double d1, double d2, const GaussLegendre& gl) {
    const double s = 1.0 + 2.0 * a;
    auto ell = [&](double t) { return t > 0 ? blend_cutoff(t, d1, d2) * std::pow(t, a - 1.0) : 0.0; };
    // t = tau^{1/a} removes the t^{a-1} endpoint singularity
    auto tau_of = [&](double t) { return std::pow(t, a); };
    double tot = 0.0;
    double lx = ell(dx);
    if (dx < d2) {
        tot += lx * std::pow(dx, 1.0 - s) / (s - 1.0) + lx * std::pow(d2 - dx, 1.0 - s) / (s - 1.0);
        double eps = 0.5 * std::min(dx, d2 - dx);
        // symmetric part; r = rho^beta makes r^{1-2a} smooth
        double beta = 1.0 / (2.0 - 2.0 * a);
        tot += graded_integral(
            [&](double rho) {
                double r = std::pow(rho, beta);
                if (r == 0.0) return 0.0;
                return (2.0 * lx - ell(dx + r) - ell(dx - r)) * std::pow(r, -s) * beta * std::pow(rho, beta - 1.0);
            },
            0.0, std::pow(eps, 1.0 / beta), gl);
        tot += graded_integral(
            [&](double tau) {
                double t = std::pow(tau, 1.0 / a);
                return (lx * std::pow(tau, 1.0 / a - 1.0) / a - blend_cutoff(t, d1, d2) / a) * std::pow(dx - t, -s);
            },
            0.0, tau_of(dx - eps), gl);
        tot += graded_integral([&](double t) { return (lx - ell(t)) * std::pow(t - dx, -s); }, dx + eps, d2, gl);
    } else {
        tot -= graded_integral(
            [&](double tau) {
                double t = std::pow(tau, 1.0 / a);
                return blend_cutoff(t, d1, d2) / a * std::pow(dx - t, -s);
            },
            0.0, tau_of(d2), gl);
    }
    return -fraclap_kernel_constant(a) * tot;
}

}  // namespace detail

/// Dense solve of r^+ P_a u = f on the interior nodes; u = 0 outside (-1, 1).
inline IntervalReport solve_dirichlet_homogeneous(const IntervalOperator& op, const std::vector<double>& f) {
    if (f.size() != op.size()) throw Error("fracdomain", "solve_dirichlet_homogeneous", "data length does not match the operator");
    Eigen::Map<const Eigen::VectorXd> fv(f.data(), long(f.size()));
    Eigen::VectorXd u = detail::dense_solve(op.matrix, fv);
    IntervalReport r;
    r.method = std::string("dense ") + construction_name(op.construction);
    for (std::size_t i = 0; i < op.size(); ++i) {
        r.x.push_back(op.x(i));
        r.u.push_back(u(long(i)));
    }
    double nf = fv.norm();
    r.residual = (op.matrix * u - fv).norm() / (nf > 0 ? nf : 1.0);
    detail::endpoint_fits(r, op.h());
    return r;
}

/// u = u0 + c_L l_L + c_R l_R with layers l = cutoff(d) d^{a-1}, c = phi / Gamma(a), and M u0 = f - c (P_a l)
/// where P_a l is evaluated by singular quadrature. Fractional Laplacian with 0 < a < 1 only.
inline IntervalReport solve_dirichlet_nonhomogeneous(const IntervalOperator& op, const std::vector<double>& f, double phi_left, double phi_right,
                                                     double residual_window = 0.5) {
    const double a = op.a;
    if (!(a > 0 && a < 1)) throw Error("fracdomain", "solve_dirichlet_nonhomogeneous", "layer calibration is implemented for 0 < a < 1");
    if (!op.fractional_laplacian) throw Error("fracdomain", "solve_dirichlet_nonhomogeneous", "layer action is known only for the fractional Laplacian");
    if (f.size() != op.size()) throw Error("fracdomain", "solve_dirichlet_nonhomogeneous", "data length does not match the operator");
    const double d1 = 0.25, d2 = 0.5;
    const std::size_t n = op.size();
    GaussLegendre gl(16);
    Eigen::VectorXd gL = Eigen::VectorXd::Zero(long(n)), lL = Eigen::VectorXd::Zero(long(n));
    for (std::size_t i = 0; i < n; ++i) {
        double dx = 1.0 + op.x(i);
        gL(long(i)) = detail::layer_action(a, dx, d1, d2, gl);
        lL(long(i)) = detail::blend_cutoff(dx, d1, d2) * std::pow(dx, a - 1.0);
    }
    Eigen::VectorXd gR = gL.reverse(), lR = lL.reverse();
    const double cL = phi_left / std::tgamma(a), cR = phi_right / std::tgamma(a);
    Eigen::Map<const Eigen::VectorXd> fv(f.data(), long(n));
    Eigen::VectorXd u0 = detail::dense_solve(op.matrix, fv - cL * gL - cR * gR);
    Eigen::VectorXd u = u0 + cL * lL + cR * lR;
    IntervalReport r;
    r.method = std::string("dense ") + construction_name(op.construction) + " + boundary layers";
    r.residual_window = residual_window;
    Eigen::VectorXd Mu = op.matrix * u;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.x.push_back(op.x(i));
        r.u.push_back(u(long(i)));
        if (std::abs(op.x(i)) <= residual_window) {
            num += std::pow(Mu(long(i)) - fv(long(i)), 2);
            den += std::pow(fv(long(i)), 2) + std::pow(cL * gL(long(i)) + cR * gR(long(i)), 2);
        }
    }
    r.residual = std::sqrt(num / (den > 0 ? den : 1.0));
    detail::endpoint_fits(r, op.h());
    // recovered traces: intercept of Gamma(a) d^{1-a} u fitted linearly on the exponent window
    const double h = op.h();
    auto trace = [&](bool left) {
        std::vector<double> xs;
        std::vector<cplx> ys;
        for (std::size_t i = 0; i < n; ++i) {
            double d = left ? 1.0 + op.x(i) : 1.0 - op.x(i);
            if (d < 20.0 * h * (1 - 1e-12) || d > 0.1) continue;
            xs.push_back(d);
            ys.push_back(std::tgamma(a) * std::pow(d, 1.0 - a) * u(long(i)));
        }
        return polyfit(xs, ys, 1).coef[0].real();
    };
    r.trace_left = trace(true);
    r.trace_right = trace(false);
    return r;
}

/// C(a) = 4^a Gamma(a + 1/2) Gamma(a + 1) / Gamma(1/2), the value of (-Delta)^a (1 - x^2)_+^a on (-1, 1).
inline double getoor_constant(double a) { return std::pow(4.0, a) * std::tgamma(a + 0.5) * std::tgamma(a + 1.0) / std::sqrt(pi); }

/// Least-squares Chebyshev coefficients |c_k| of u on [lo, hi] from the grid samples there.
inline std::vector<double> interior_chebyshev(const std::vector<double>& x, const std::vector<double>& u, int degree, double lo = -0.5,
                                              double hi = 0.5) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= lo && x[i] <= hi) idx.push_back(i);
    if (degree < 0 || idx.size() < std::size_t(degree) + 1) throw Error("fracdomain", "interior_chebyshev", "too few samples for the degree");
    Eigen::MatrixXd V(long(idx.size()), degree + 1);
    Eigen::VectorXd y(long(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
        double t = (2 * x[idx[r]] - lo - hi) / (hi - lo);
        double t0 = 1.0, t1 = t;
        for (int k = 0; k <= degree; ++k) {
            V(long(r), k) = t0;
            double t2 = 2 * t * t1 - t0;
            t0 = t1;
            t1 = t2;
        }
        y(long(r)) = u[idx[r]];
    }
    Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
    std::vector<double> out(std::size_t(degree) + 1);
    for (int k = 0; k <= degree; ++k) out[std::size_t(k)] = std::abs(c(k));
    return out;
}

}  // namespace mutrans
