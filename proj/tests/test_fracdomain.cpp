#include <gtest/gtest.h>

#include <cmath>

#include <mutrans/fracdomain.hpp>

#include "oracles.hpp"

using namespace mutrans;

namespace {

Eigen::VectorXd sample(const IntervalOperator& op, const std::function<double(double)>& g) {
    Eigen::VectorXd v(long(op.size()));
    for (std::size_t i = 0; i < op.size(); ++i) v(long(i)) = g(op.x(i));
    return v;
}

std::vector<double> constant(const IntervalOperator& op, double c) { return std::vector<double>(op.size(), c); }

double rel_gap(const std::vector<double>& u, const Eigen::VectorXd& ref) {
    Eigen::Map<const Eigen::VectorXd> v(u.data(), long(u.size()));
    return (v - ref).norm() / ref.norm();
}

// max |M u / C(a) - 1| on |x| <= 1/2 for u = (1 - x^2)^a
double getoor_error(double a, std::size_t N) {
    IntervalOperator op = assemble_fraclap(a, N, Construction::box_fft);
    Eigen::VectorXd v = op.matrix * sample(op, [a](double x) { return std::pow(1 - x * x, a); });
    double e = 0.0;
    for (std::size_t i = 0; i < op.size(); ++i)
        if (std::abs(op.x(i)) <= 0.5) e = std::max(e, std::abs(v(long(i)) / getoor_constant(a) - 1.0));
    return e;
}

double bump(double x) { return std::abs(x) < 0.5 ? std::exp(-1 / (1 - 4 * x * x)) : 0.0; }

}  // namespace

TEST(Getoor, ConstantAgainstQuadrature) {
    for (double a : {0.25, 0.5, 0.75})
        for (double x0 : {0.0, 0.3, -0.6}) EXPECT_NEAR(oracle::fraclap_of_bump(a, x0) / getoor_constant(a), 1.0, 1e-8) << a << " " << x0;
}

TEST(Getoor, OperatorActionConverges) {
    for (double a : {0.25, 0.5, 0.75}) {
        double e1 = getoor_error(a, 1024), e2 = getoor_error(a, 2048);
        EXPECT_LE(e2, 1e-3) << a;
        EXPECT_LT(e2, e1) << a;
    }
}

TEST(Assemble, Symmetry) {
    for (Construction c : {Construction::box_fft, Construction::eigen_power}) {
        IntervalOperator op = assemble_fraclap(0.6, 256, c);
        EXPECT_LE((op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_EQ(op.size(), 255u);
        Eigen::LLT<Eigen::MatrixXd> llt(op.matrix);
        EXPECT_EQ(llt.info(), Eigen::Success);
    }
}

TEST(Assemble, Errors) {
    EXPECT_THROW(assemble_fraclap(0.5, 1000, Construction::box_fft), Error);
    EXPECT_THROW(assemble_fraclap(0.5, 32, Construction::box_fft), Error);
    EXPECT_THROW(assemble_fraclap(2.0, 256, Construction::box_fft), Error);
    EXPECT_THROW(assemble_fraclap(0.0, 256, Construction::eigen_power), Error);
    try {
        assemble_fraclap(0.5, 256, Construction::box_fft, 8.001);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("align"), std::string::npos);
    }
}

TEST(Assemble, ClassicalPowerIsSecondOrder) {
    // -u'' = (pi/2)^2 u for u = cos(pi x / 2)
    auto err = [](std::size_t N) {
        IntervalOperator op = assemble_fraclap(1.0, N, Construction::eigen_power);
        Eigen::VectorXd u = sample(op, [](double x) { return std::cos(pi * x / 2); });
        return (op.matrix * u - (pi * pi / 4) * u).cwiseAbs().maxCoeff();
    };
    double e1 = err(256), e2 = err(512);
    EXPECT_LE(e2, 1e-4);
    EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(Assemble, ConstructionsAgainstQuadrature) {
    // box_fft is spectrally accurate on smooth data; eigen_power carries the O(h^2) error of the second difference
    for (double a : {0.3, 0.5, 0.75}) {
        double prev = INFINITY;
        for (std::size_t N : {1024u, 2048u}) {
            IntervalOperator f = assemble_fraclap(a, N, Construction::box_fft), e = assemble_fraclap(a, N, Construction::eigen_power);
            Eigen::VectorXd b = sample(f, bump), ex(long(f.size()));
            for (std::size_t i = 0; i < f.size(); ++i) ex(long(i)) = oracle::fraclap_smooth(a, bump, 0.5, f.x(i));
            Eigen::VectorXd vf = f.matrix * b, ve = e.matrix * b;
            EXPECT_LE((vf - ex).norm() / ex.norm(), 1e-8) << a;
            double ee = (ve - ex).norm() / ex.norm();
            if (N == 2048) {
                EXPECT_NEAR(prev / ee, 4.0, 0.2) << a;
                EXPECT_LE((vf - ve).norm() / vf.norm(), 1e-4) << a;
            }
            prev = ee;
        }
    }
}

TEST(Homogeneous, GetoorSolution) {
    struct Case {
        double a;
        std::size_t N;
    };
    for (Case c : {Case{0.5, 2048}, Case{0.75, 2048}, Case{0.25, 4096}}) {
        IntervalOperator op = assemble_fraclap(c.a, c.N, Construction::box_fft);
        IntervalReport r = solve_dirichlet_homogeneous(op, constant(op, getoor_constant(c.a)));
        EXPECT_LE(rel_gap(r.u, sample(op, [&](double x) { return std::pow(1 - x * x, c.a); })), 1e-3) << c.a;
        EXPECT_LE(r.residual, 1e-10);
    }
}

TEST(Homogeneous, GetoorSolutionImprovesUnderRefinement) {
    double prev = INFINITY;
    for (std::size_t N : {1024u, 2048u}) {
        IntervalOperator op = assemble_fraclap(0.25, N, Construction::box_fft);
        IntervalReport r = solve_dirichlet_homogeneous(op, constant(op, getoor_constant(0.25)));
        double e = rel_gap(r.u, sample(op, [](double x) { return std::pow(1 - x * x, 0.25); }));
        EXPECT_LT(e, prev);
        prev = e;
    }
}

TEST(Homogeneous, ExponentFits) {
    for (double a : {0.3, 0.5, 0.7, 1.3}) {
        IntervalOperator op = assemble_fraclap(a, 2048, Construction::box_fft);
        IntervalReport r = solve_dirichlet_homogeneous(op, constant(op, 1.0));
        ASSERT_TRUE(r.fits_valid) << r.fit_error;
        EXPECT_NEAR(r.left.alpha_hat, a, 0.05) << a;
        EXPECT_NEAR(r.right.alpha_hat, a, 0.05) << a;
    }
}

TEST(Homogeneous, OddDataGivesOddSolution) {
    IntervalOperator op = assemble_fraclap(0.4, 512, Construction::box_fft);
    std::vector<double> f(op.size());
    for (std::size_t i = 0; i < op.size(); ++i) f[i] = op.x(i) * std::exp(-op.x(i) * op.x(i));
    IntervalReport r = solve_dirichlet_homogeneous(op, f);
    double m = 0.0, s = 0.0;
    for (std::size_t i = 0; i < op.size(); ++i) {
        m = std::max(m, std::abs(r.u[i] + r.u[op.size() - 1 - i]));
        s = std::max(s, std::abs(r.u[i]));
    }
    EXPECT_LE(m, 1e-10 * s);
    EXPECT_THROW(solve_dirichlet_homogeneous(op, std::vector<double>(3, 1.0)), Error);
}

TEST(Homogeneous, SingularMatrixIsReported) {
    IntervalOperator op = assemble_fraclap(0.5, 64, Construction::box_fft);
    op.matrix.setZero();
    try {
        solve_dirichlet_homogeneous(op, constant(op, 1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("singular"), std::string::npos);
    }
}

TEST(Homogeneous, InteriorChebyshevDecay) {
    IntervalOperator op = assemble_fraclap(0.5, 2048, Construction::box_fft);
    IntervalReport r = solve_dirichlet_homogeneous(op, constant(op, 1.0));
    std::vector<double> c = interior_chebyshev(r.x, r.u, 16);
    EXPECT_LE(c[16] / c[0], 1e-6);
    EXPECT_LE(c[12] / c[0], 1e-5);
    EXPECT_LT(c[14], c[4]);
}

TEST(Nonhomogeneous, ZeroTracesReduceToHomogeneous) {
    IntervalOperator op = assemble_fraclap(0.5, 512, Construction::box_fft);
    IntervalReport a = solve_dirichlet_homogeneous(op, constant(op, 1.0));
    IntervalReport b = solve_dirichlet_nonhomogeneous(op, constant(op, 1.0), 0.0, 0.0);
    Eigen::Map<const Eigen::VectorXd> ua(a.u.data(), long(a.u.size())), ub(b.u.data(), long(b.u.size()));
    EXPECT_LE((ua - ub).norm() / ua.norm(), 1e-12);
}

TEST(Nonhomogeneous, LayerExponentAndTraces) {
    IntervalOperator op = assemble_fraclap(0.5, 4096, Construction::box_fft);
    IntervalReport r = solve_dirichlet_nonhomogeneous(op, constant(op, 0.0), 1.0, 1.0);
    ASSERT_TRUE(r.fits_valid) << r.fit_error;
    EXPECT_NEAR(r.left.alpha_hat, -0.5, 0.05);
    EXPECT_NEAR(r.right.alpha_hat, -0.5, 0.05);
    EXPECT_NEAR(r.trace_left, 1.0, 5e-2);
    EXPECT_NEAR(r.trace_right, 1.0, 5e-2);
}

TEST(Nonhomogeneous, AsymmetricTraces) {
    IntervalOperator op = assemble_fraclap(0.5, 2048, Construction::box_fft);
    IntervalReport r = solve_dirichlet_nonhomogeneous(op, constant(op, 1.0), 2.0, -1.0);
    EXPECT_NEAR(r.trace_left / 2.0, 1.0, 5e-2);
    EXPECT_NEAR(r.trace_right / -1.0, 1.0, 5e-2);
    // the sampled d^{a-1} layer limits the interior residual to O(h^{1/2})
    IntervalOperator coarse = assemble_fraclap(0.5, 1024, Construction::box_fft);
    double r1 = solve_dirichlet_nonhomogeneous(coarse, constant(coarse, 1.0), 2.0, -1.0).residual;
    EXPECT_NEAR(r.residual / r1, std::sqrt(0.5), 0.05);
}

TEST(Nonhomogeneous, Errors) {
    IntervalOperator big = assemble_fraclap(1.3, 128, Construction::box_fft);
    EXPECT_THROW(solve_dirichlet_nonhomogeneous(big, constant(big, 0.0), 1.0, 1.0), Error);
    IntervalOperator var = fracpow_variable([](double x) { return 1.0 + x * x; }, 0.5, 128);
    EXPECT_THROW(solve_dirichlet_nonhomogeneous(var, constant(var, 0.0), 1.0, 1.0), Error);
}

TEST(VariablePower, ConstantCoefficientClassicalLimit) {
    // -u'' + 4u = 1 on (-1, 1), u(+-1) = 0: u = (1 - cosh 2x / cosh 2) / 4
    auto exact = [](double x) { return (1 - std::cosh(2 * x) / std::cosh(2.0)) / 4; };
    auto err = [&](std::size_t N) {
        IntervalOperator op = fracpow_variable([](double) { return 4.0; }, 1.0, N);
        IntervalReport r = solve_dirichlet_homogeneous(op, constant(op, 1.0));
        return rel_gap(r.u, sample(op, exact));
    };
    double e1 = err(128), e2 = err(256);
    EXPECT_LE(e2, 1e-4);
    EXPECT_NEAR(e1 / e2, 4.0, 0.3);
}

TEST(VariablePower, ApproachesClassicalSolution) {
    auto exact = [](double x) { return (1 - std::cosh(2 * x) / std::cosh(2.0)) / 4; };
    double prev = INFINITY;
    for (double a : {0.9, 0.95, 0.99}) {
        IntervalOperator op = fracpow_variable([](double) { return 4.0; }, a, 512);
        IntervalReport r = solve_dirichlet_homogeneous(op, constant(op, 1.0));
        double e = rel_gap(r.u, sample(op, exact));
        EXPECT_LT(e, prev) << a;
        prev = e;
    }
}

TEST(VariablePower, ExponentFit) {
    IntervalOperator op = fracpow_variable([](double x) { return 1.0 + 0.5 * x * x; }, 0.7, 1024);
    EXPECT_FALSE(op.fractional_laplacian);
    EXPECT_LE((op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    IntervalReport r = solve_dirichlet_homogeneous(op, constant(op, 1.0));
    ASSERT_TRUE(r.fits_valid);
    EXPECT_NEAR(r.left.alpha_hat, 0.7, 0.05);
    EXPECT_NEAR(r.right.alpha_hat, 0.7, 0.05);
}

TEST(VariablePower, Errors) {
    EXPECT_THROW(fracpow_variable([](double x) { return -1000.0 + x; }, 0.5, 128), Error);
    EXPECT_THROW(fracpow_variable([](double) { return 1.0; }, 2.5, 128), Error);
}

TEST(ExponentFit, ExactPower) {
    const std::size_t N = 2048;
    std::vector<double> x, u;
    for (std::size_t k = 1; k < N; ++k) {
        x.push_back(-1.0 + 2.0 * double(k) / double(N));
        u.push_back(std::pow(1 - x.back() * x.back(), 0.7));
    }
    // (1 - x^2)^0.7 = d^0.7 (2 - d)^0.7, so one side only to fit d^0.7 exactly
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = std::pow(1 + x[i], 0.7);
    ExponentFit f = fit_boundary_exponent(x, v, Endpoint::left);
    EXPECT_NEAR(f.alpha_hat, 0.7, 1e-3);
    EXPECT_NEAR(f.d_min, 20.0 * 2.0 / double(N), 1e-15);
    EXPECT_DOUBLE_EQ(f.d_max, 0.1);
    EXPECT_NEAR(fit_boundary_exponent(x, u, Endpoint::both).alpha_hat, 0.7, 0.05);
}

TEST(ExponentFit, PerturbedPowerMatchesLeastSquaresSlope) {
    const std::size_t N = 2048;
    const double h = 2.0 / double(N);
    std::vector<double> x, u;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = 1; k < N; ++k) {
        double xx = -1.0 + double(k) * h, d = 1 + xx;
        x.push_back(xx);
        u.push_back(std::pow(d, 0.7) * (1 + d));
        if (d >= 20 * h * (1 - 1e-12) && d <= 0.1 * (1 + 1e-12)) {
            double lx = std::log(d), ly = std::log(u.back());
            sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, ++n;
        }
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    ExponentFit f = fit_boundary_exponent(x, u, Endpoint::left);
    EXPECT_NEAR(f.alpha_hat, slope, 1e-10);
    EXPECT_NEAR(f.alpha_hat, 0.7, 0.05);
}

TEST(ExponentFit, Errors) {
    std::vector<double> x, u;
    for (std::size_t k = 1; k < 512; ++k) {
        x.push_back(-1.0 + double(k) / 256.0);
        u.push_back(std::sin(200 * x.back()));
    }
    try {
        fit_boundary_exponent(x, u, Endpoint::left);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("exponent fit invalid across zeros"), std::string::npos);
    }
    EXPECT_THROW(fit_boundary_exponent(x, u, Endpoint::left, 0.01, 0.3), Error);
    EXPECT_THROW(fit_boundary_exponent(x, u, Endpoint::left, 0.1, 0.05), Error);
    EXPECT_THROW(fit_boundary_exponent({0.0}, {1.0}, Endpoint::left), Error);
}
