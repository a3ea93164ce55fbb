#pragma once

// Reference solutions built without the library's spectral machinery.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

/// Numerov solve of -u'' + c(x) u = f on [x0, x1] with u(x0) = u(x1) = 0, n intervals.
inline std::vector<double> numerov(const std::function<double(double)>& c, const std::function<double(double)>& f, double x0, double x1,
                                   std::size_t n) {
    const double h = (x1 - x0) / double(n), w = h * h / 12.0;
    std::size_t m = n - 1;
    std::vector<double> lo(m), di(m), up(m), rhs(m);
    auto X = [&](std::size_t i) { return x0 + double(i) * h; };
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t i = k + 1;
        // u'' = c u - f, so (1 - w c) u_{i+-1} terms and -(2 + 10 w c) u_i
        lo[k] = 1.0 - w * c(X(i - 1));
        di[k] = -(2.0 + 10.0 * w * c(X(i)));
        up[k] = 1.0 - w * c(X(i + 1));
        rhs[k] = -w * (f(X(i - 1)) + 10.0 * f(X(i)) + f(X(i + 1)));
    }
    for (std::size_t k = 1; k < m; ++k) {
        double r = lo[k] / di[k - 1];
        di[k] -= r * up[k - 1];
        rhs[k] -= r * rhs[k - 1];
    }
    std::vector<double> u(n + 1, 0.0);
    u[m] = rhs[m - 1] / di[m - 1];
    for (std::size_t k = m - 1; k-- > 0;) u[k + 1] = (rhs[k] - up[k] * u[k + 2]) / di[k];
    return u;
}

/// (-Delta)^a (1 - x^2)_+^a at x0 by adaptive quadrature of the hypersingular integral
/// c_{1,a} int_0^inf (2u(x0) - u(x0+y) - u(x0-y)) y^{-1-2a} dy.
inline double fraclap_of_bump(double a, double x0) {
    auto u = [a](double t) { return std::abs(t) < 1 ? std::pow(1 - t * t, a) : 0.0; };
    struct P {
        double a, x0;
        std::function<double(double)> u;
    } prm{a, x0, u};
    gsl_function F;
    F.function = [](double y, void* v) {
        auto* p = static_cast<P*>(v);
        if (y <= 0) return 0.0;
        return (2 * p->u(p->x0) - p->u(p->x0 + y) - p->u(p->x0 - y)) * std::pow(y, -1 - 2 * p->a);
    };
    F.params = &prm;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
    double y1 = 1 - std::abs(x0), y2 = 1 + std::abs(x0), s1, s2, err;
    gsl_integration_qags(&F, 0.0, y1, 0.0, 1e-11, 2000, ws, &s1, &err);
    gsl_integration_qags(&F, y1, y2, 0.0, 1e-11, 2000, ws, &s2, &err);
    gsl_integration_workspace_free(ws);
    gsl_set_error_handler(old);
    double tail = 2 * u(x0) * std::pow(y2, -2 * a) / (2 * a);
    double c = std::pow(4.0, a) * std::tgamma(0.5 + a) / (std::sqrt(pi) * std::abs(std::tgamma(-a)));
    return c * (s1 + s2 + tail);
}

/// (-Delta)^a u at x0 for smooth u supported in [-R, R], same hypersingular integral as above.
inline double fraclap_smooth(double a, const std::function<double(double)>& u, double R, double x0) {
    struct P {
        double a, x0;
        const std::function<double(double)>* u;
    } prm{a, x0, &u};
    gsl_function F;
    F.function = [](double y, void* v) {
        auto* p = static_cast<P*>(v);
        if (y <= 0) return 0.0;
        const auto& g = *p->u;
        return (2 * g(p->x0) - g(p->x0 + y) - g(p->x0 - y)) * std::pow(y, -1 - 2 * p->a);
    };
    F.params = &prm;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4000);
    double Y = std::abs(x0) + R, s, err;
    gsl_integration_qags(&F, 0.0, Y, 1e-14, 1e-11, 4000, ws, &s, &err);
    gsl_integration_workspace_free(ws);
    gsl_set_error_handler(old);
    double c = std::pow(4.0, a) * std::tgamma(0.5 + a) / (std::sqrt(pi) * std::abs(std::tgamma(-a)));
    return c * (s + u(x0) * std::pow(Y, -2 * a) / a);
}

/// Finite-section solve of r+ OP((sigma^2 + xi^2)^{1/2}) e+ u = f on the nodes x_i = i h, i = 0..N/2-1, of
/// the periodic box [-L, L). The unknowns are c and w(x_i), i >= 1, for u = c x^{1/2} e^{-sigma x}/Gamma(3/2) + w,
/// where r+ P of the singular column is the exact sqrt(2 sigma) e^{-sigma x}.
inline std::vector<double> sqrt_symbol_halfline(double sigma, std::size_t N, double L, const std::function<double(double)>& f) {
    const double h = 2 * L / double(N);
    const std::size_t n = N / 2;
    std::vector<double> t(N);
    for (std::size_t m = 0; m < N; ++m) {
        double s = 0.0;
        for (long j = -long(N / 2); j < long(N / 2); ++j) {
            double xi = pi * double(j) / L;
            s += std::sqrt(sigma * sigma + xi * xi) * std::cos(xi * double(m) * h);
        }
        t[m] = s / (2 * L) * h;
    }
    Eigen::MatrixXd T(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = double(i) * h;
        rhs(long(i)) = f(x);
        T(long(i), 0) = std::sqrt(2 * sigma) * std::exp(-sigma * x);
        for (std::size_t j = 1; j < n; ++j) T(long(i), long(j)) = t[(i + N - j) % N];
    }
    Eigen::VectorXd s = T.partialPivLu().solve(rhs);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = double(i) * h;
        u[i] = s(0) * std::sqrt(x) * std::exp(-sigma * x) / std::tgamma(1.5) + (i ? s(long(i)) : 0.0);
    }
    return u;
}

/// Trapezoid Nystrom solve of v(x) - k int_0^X e^{-b|x-y|} v(y) dy = g(x) on n intervals, one Richardson step.
inline std::vector<double> exp_kernel_truncated(double k, double b, const std::function<double(double)>& g, double X, std::size_t n) {
    auto solve = [&](std::size_t m) {
        double h = X / double(m);
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(long(m + 1), long(m + 1));
        Eigen::VectorXd r(long(m + 1));
        for (std::size_t i = 0; i <= m; ++i) {
            r(long(i)) = g(double(i) * h);
            for (std::size_t j = 0; j <= m; ++j) {
                double wgt = (j == 0 || j == m) ? 0.5 * h : h;
                A(long(i), long(j)) -= k * wgt * std::exp(-b * std::abs(double(i) - double(j)) * h);
            }
        }
        return Eigen::VectorXd(A.partialPivLu().solve(r));
    };
    Eigen::VectorXd c = solve(n), f = solve(2 * n);
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) v[i] = (4 * f(long(2 * i)) - c(long(i))) / 3;
    return v;
}

}  // namespace oracle
