#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "special.hpp"

namespace mutrans {

struct PolyFit {
    std::vector<cplx> coef;  // in powers of x (unscaled)
    double residual = 0.0;   // rms residual / rms data
};

/// Least-squares polynomial of the given degree through (x_i, y_i).
inline PolyFit polyfit(const std::vector<double>& x, const std::vector<cplx>& y, int degree) {
    const int n = int(x.size());
    if (n <= degree) throw Error("fit", "polyfit", "not enough points for the requested degree");
    double xs = 0.0;
    for (double v : x) xs = std::max(xs, std::abs(v));
    if (xs == 0.0) xs = 1.0;
    Eigen::MatrixXd A(n, degree + 1);
    Eigen::MatrixXcd b(n, 1);
    for (int i = 0; i < n; ++i) {
        double t = x[std::size_t(i)] / xs, p = 1.0;
        for (int d = 0; d <= degree; ++d, p *= t) A(i, d) = p;
        b(i, 0) = y[std::size_t(i)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXcd c(degree + 1, 1);
    c.real() = qr.solve(b.real());
    c.imag() = qr.solve(b.imag());
    PolyFit f;
    double sc = 1.0;
    for (int d = 0; d <= degree; ++d, sc /= xs) f.coef.push_back(c(d, 0) * sc);
    Eigen::MatrixXcd r = A.cast<cplx>() * c - b;
    double nb = b.norm();
    f.residual = nb > 0 ? r.norm() / nb : r.norm();
    return f;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_dev = 0.0;
};

/// Least-squares line y = slope x + intercept with the max absolute deviation.
inline LineFit linefit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) throw Error("fit", "linefit", "need at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
    mx /= double(n);
    my /= double(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < n; ++i) f.max_dev = std::max(f.max_dev, std::abs(y[i] - f.slope * x[i] - f.intercept));
    return f;
}

}  // namespace mutrans
