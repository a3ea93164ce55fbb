#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_zeta.h>

namespace mutrans {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

/// Error raised by any module; carries the module and operation names.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string op, const std::string& what)
        : std::runtime_error(module + "::" + op + ": " + what),
          module_(std::move(module)), op_(std::move(op)) {}
    const std::string& module() const { return module_; }
    const std::string& op() const { return op_; }

private:
    std::string module_;
    std::string op_;
};

namespace detail {
inline void gsl_quiet() {
    static std::once_flag flag;
    std::call_once(flag, [] { gsl_set_error_handler_off(); });
}
}  // namespace detail

/// Gamma function for complex argument.
inline cplx cgamma(cplx z) {
    detail::gsl_quiet();
    if (z.imag() == 0.0) {
        double x = z.real();
        if (x <= 0 && x == std::floor(x)) return {std::numeric_limits<double>::infinity(), 0.0};
        return std::tgamma(x);
    }
    gsl_sf_result lnr, arg;
    if (gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg) != GSL_SUCCESS)
        throw Error("special", "cgamma", "evaluation failed");
    return std::polar(std::exp(lnr.val), arg.val);
}

/// 1/Gamma(z), zero at the poles.
inline cplx crgamma(cplx z) {
    if (z.imag() == 0.0) {
        double x = z.real();
        if (x <= 0 && x == std::floor(x)) return 0.0;
    }
    return 1.0 / cgamma(z);
}

/// Generalized binomial coefficient binom(mu, n) for integer n >= 0.
inline cplx binom(cplx mu, int n) {
    cplx c = 1.0;
    for (int i = 0; i < n; ++i) c *= (mu - double(i)) / double(i + 1);
    return c;
}

/// Riemann zeta, valid for real s != 1 including negative s.
inline double zeta(double s) {
    detail::gsl_quiet();
    gsl_sf_result r;
    if (gsl_sf_zeta_e(s, &r) != GSL_SUCCESS) throw Error("special", "zeta", "evaluation failed at s=" + std::to_string(s));
    return r.val;
}

/// Hurwitz zeta sum_{k>=0} (q+k)^{-s}, s > 1, q > 0.
inline double hurwitz_zeta(double s, double q) {
    detail::gsl_quiet();
    gsl_sf_result r;
    if (gsl_sf_hzeta_e(s, q, &r) != GSL_SUCCESS)
        throw Error("special", "hurwitz_zeta", "evaluation failed at s=" + std::to_string(s) + " q=" + std::to_string(q));
    return r.val;
}

/// Fixed-order Gauss-Legendre rule on [a, b].
class GaussLegendre {
public:
    explicit GaussLegendre(std::size_t n) : table_(gsl_integration_glfixed_table_alloc(n)), n_(n) {
        if (!table_) throw Error("special", "GaussLegendre", "table allocation failed");
        nodes_.resize(n);
        weights_.resize(n);
        for (std::size_t i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &nodes_[i], &weights_[i], table_);
    }
    ~GaussLegendre() { gsl_integration_glfixed_table_free(table_); }
    GaussLegendre(const GaussLegendre&) = delete;
    GaussLegendre& operator=(const GaussLegendre&) = delete;

    template <class F>
    double integrate(F&& f, double a, double b) const {
        double c = 0.5 * (a + b), r = 0.5 * (b - a), s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += weights_[i] * f(c + r * nodes_[i]);
        return r * s;
    }

private:
    gsl_integration_glfixed_table* table_;
    std::size_t n_;
    std::vector<double> nodes_, weights_;
};

}  // namespace mutrans
