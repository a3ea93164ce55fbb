#include <gtest/gtest.h>

#include <cmath>

#include <mutrans/halfline.hpp>
#include <mutrans/parse.hpp>

#include "oracles.hpp"

using namespace mutrans;

namespace {

constexpr double L = 20.48;

double f_exp(double x) { return std::exp(-x); }

// max relative gap between u on the library grid and oracle values at x = i * hx, i = 1..n-1
double gap_on_nodes(const GridFunction& u, const std::vector<double>& ref, double hx, std::size_t n) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t k = u.k0() + std::size_t(std::llround(double(i) * hx / u.h()));
        num += std::norm(u[k] - ref[i]);
        den += ref[i] * ref[i];
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST(Homogeneous, PlusSymbolIsExactlyInverted) {
    for (double nu : {0.4, 1.5}) {
        ModelProblem pr = make_problem(chiplus(nu), 1.5, 1 << 14, L);
        EXPECT_NEAR(std::abs(pr.mu0 - nu), 0.0, 1e-6);
        SolveReport r = solve_homogeneous(pr, GridFunction::half_line(pr.N, L, f_exp));
        EXPECT_EQ(r.method, "parametrix (q = 1)");
        EXPECT_LE(r.residual, 1e-8) << nu;
        EXPECT_TRUE(r.converged);
    }
}

TEST(Homogeneous, ClassicalCaseAgainstNumerov) {
    // -u'' + 4u = e^{-x} cos x, u(0) = 0
    const double sigma = 2.0;
    auto f = [](double x) { return std::exp(-x) * std::cos(x); };
    ModelProblem pr = make_problem(abs2pow(1.0), sigma, 1 << 19, L);
    SolveReport r = solve_homogeneous(pr, GridFunction::half_line(pr.N, L, f));
    const std::size_t n = 1 << 14;
    std::vector<double> ref = oracle::numerov([](double) { return 4.0; }, f, 0.0, L, n);
    EXPECT_LE(gap_on_nodes(r.u, ref, L / double(n), n), 1e-6);
    EXPECT_LE(r.residual, 1e-4);
}

TEST(Homogeneous, SquareRootSymbolAgainstDenseSection) {
    const double sigma = 2.0, Lb = 10.24;
    const std::size_t n = 2048;
    // the oracle itself against the closed form for f = e^{-x}
    std::vector<double> e = oracle::sqrt_symbol_halfline(sigma, n, Lb, f_exp);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < n / 2; ++i) {
        double x = double(i) * 2 * Lb / double(n), ex = std::exp(-x) * std::erf(std::sqrt(x)) / std::sqrt(3.0);
        num += (e[i] - ex) * (e[i] - ex);
        den += ex * ex;
    }
    ASSERT_LE(std::sqrt(num / den), 1e-4);

    auto f = [](double x) { return std::exp(-2 * x) * (1 + x * x); };
    std::vector<double> ref = oracle::sqrt_symbol_halfline(sigma, n, Lb, f);
    ModelProblem pr = make_problem(abs2pow(0.5), sigma, 1 << 16, Lb);
    SolveReport r = solve_homogeneous(pr, GridFunction::half_line(pr.N, Lb, f));
    EXPECT_LE(gap_on_nodes(r.u, ref, 2 * Lb / double(n), n / 2), 1e-3);
}

TEST(Homogeneous, ResidualDecreasesUnderRefinement) {
    for (double a : {0.5, 0.75}) {
        double prev = INFINITY;
        for (std::size_t N : {1u << 14, 1u << 15, 1u << 16}) {
            ModelProblem pr = make_problem(abs2pow(a), 2.0, N, L);
            double res = solve_homogeneous(pr, GridFunction::half_line(N, L, f_exp)).residual;
            EXPECT_LT(res, 0.55 * prev) << a << " " << N;
            prev = res;
        }
        EXPECT_LE(prev, 1e-4);
    }
}

TEST(Homogeneous, WienerHopfPath) {
    // the order-0 factor leaves a normalized symbol that is not identically 1
    BoundarySymbol p = parse_symbol("abs2pow(0.5)*(2*sigma^2 + xi^2)/(sigma^2 + xi^2)");
    ModelProblem pr = make_problem(p, 1.0, 1 << 16, L);
    EXPECT_NEAR(std::abs(pr.mu0 - 0.5), 0.0, 1e-6);
    SolveReport r = solve_homogeneous(pr, GridFunction::half_line(pr.N, L, f_exp));
    EXPECT_EQ(r.method, "parametrix (Wiener-Hopf)");
    EXPECT_LE(r.residual, 1e-4);
    EXPECT_NEAR(r.exponent_fit.alpha_hat, 0.5, 0.05);
}

TEST(Homogeneous, ExponentLaw) {
    for (double a : {0.25, 0.5, 0.75, 1.3}) {
        ModelProblem pr = make_problem(abs2pow(a), 2.0, 1 << 16, L);
        SolveReport r = solve_homogeneous(pr, GridFunction::half_line(pr.N, L, f_exp));
        EXPECT_NEAR(r.exponent_fit.alpha_hat, a, 0.05) << a;
        ASSERT_EQ(r.traces.values.size(), 1u);
    }
}

TEST(Homogeneous, MuNormStableUnderRefinement) {
    for (double a : {0.5, 0.75}) {
        double v1 = 0.0, v2 = 0.0;
        for (std::size_t N : {1u << 14, 1u << 15}) {
            ModelProblem pr = make_problem(abs2pow(a), 2.0, N, L);
            SolveReport r = solve_homogeneous(pr, GridFunction::half_line(N, L, f_exp));
            (N == (1u << 14) ? v1 : v2) = solution_mu_norm(r, pr.mu0, a + 0.3, 2.0).value;
        }
        EXPECT_TRUE(std::isfinite(v2));
        EXPECT_NEAR(v2 / v1, 1.0, 1e-2) << a;
    }
}

TEST(Nonhomogeneous, PlusSymbolPoissonField) {
    for (double nu : {0.6, 1.5}) {
        ModelProblem pr = make_problem(chiplus(nu), 1.0, 1 << 14, L);
        SolveReport r = solve_nonhomogeneous(pr, GridFunction(pr.N, L, Side::nonneg), 1.0);
        GridFunction ex = GridFunction::half_line(pr.N, L, [nu](double x) { return std::pow(x, nu - 1) * std::exp(-x) / std::tgamma(nu); });
        EXPECT_LE(rel_l2(r.u, ex, 0.0, L), 1e-12) << nu;
        ASSERT_EQ(r.traces.values.size(), 1u);
        EXPECT_NEAR(std::abs(r.traces.values[0] - 1.0), 0.0, 1e-6);
    }
}

TEST(Nonhomogeneous, TraceRecovery) {
    for (double sigma : {1.5, 2.0}) {
        ModelProblem pr = make_problem(abs2pow(0.5), sigma, 1 << 16, L);
        SolveReport r = solve_nonhomogeneous(pr, GridFunction::half_line(pr.N, L, f_exp), 2.0);
        ASSERT_EQ(r.traces.values.size(), 1u);
        EXPECT_LE(std::abs(r.traces.values[0] - 2.0) / 2.0, 1e-3) << sigma;
        EXPECT_LE(r.residual, 1e-4);
        EXPECT_NEAR(r.exponent_fit.alpha_hat, -0.5, 0.05);
    }
}

TEST(Nonhomogeneous, ZeroDataReducesToHomogeneous) {
    ModelProblem pr = make_problem(abs2pow(0.5), 2.0, 1 << 14, L);
    GridFunction f = GridFunction::half_line(pr.N, L, f_exp);
    SolveReport a = solve_homogeneous(pr, f), b = solve_nonhomogeneous(pr, f, 0.0);
    EXPECT_LE(rel_l2(a.u, b.u), 1e-14);
    EXPECT_NEAR(a.residual, b.residual, 1e-14);
}

TEST(Nonhomogeneous, NeedsPositiveIndex) {
    ModelProblem pr = make_problem(chiminus(0.5), 1.0, 1 << 10, L);
    EXPECT_THROW(solve_nonhomogeneous(pr, GridFunction::half_line(pr.N, L, f_exp), 1.0), Error);
}

TEST(Mapping, PowerSymbols) {
    auto v = [](double x) { return std::exp(-x) * (1 + 0.5 * x); };
    for (double a : {0.25, 0.5, 0.75}) {
        ModelProblem pr = make_problem(abs2pow(a), 1.0, 1 << 15, L);
        TransmissionMappingResult good = transmission_mapping_test(pr, a, v);
        EXPECT_FALSE(good.inconclusive);
        EXPECT_TRUE(good.smooth) << a << " " << good.score;
        TransmissionMappingResult bad = transmission_mapping_test(pr, 0.0, v);
        EXPECT_FALSE(bad.smooth) << a << " " << bad.score;
    }
}

TEST(Mapping, OrderZeroSymbolFollowsTransmissionVerdict) {
    auto v = [](double x) { return std::exp(-x) * (1 + 0.5 * x); };
    BoundarySymbol p = abs2pow(0.0);
    ModelProblem pr = make_problem(p, 1.0, 1 << 15, L);
    for (double mu : {0.0, 0.5, 1.0, 0.3}) {
        TransmissionMappingResult t = transmission_mapping_test(pr, mu, v);
        EXPECT_EQ(t.smooth, check_mu_transmission(p, mu, 3).passed) << mu << " " << t.score;
    }
    EXPECT_THROW(transmission_mapping_test(pr, -1.5, v), Error);
}

TEST(ExponentFit, RejectsSignChange) {
    GridFunction u = GridFunction::half_line(1 << 12, L, [](double x) { return std::sqrt(x) * std::cos(40 * x); });
    EXPECT_THROW(fit_exponent_halfline(u, 0.01, 0.2), Error);
    GridFunction w = GridFunction::half_line(1 << 12, L, [](double x) { return std::pow(x, 0.7); });
    EXPECT_NEAR(fit_exponent_halfline(w, 0.01, 0.2).alpha_hat, 0.7, 1e-12);
}
