#include "abstop/boundary_solver.hpp"
#include "abstop/error.hpp"
#include "abstop/value_function.hpp"
#include "abstop/verification.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace abstop;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double alpha_one_closed_form(double y) {
    return std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * y * y) * normal_cdf(y);
}

} // namespace

TEST(Classify, Regimes) {
    EXPECT_EQ(classify(0.0), Regime::zero);
    EXPECT_EQ(classify(0.3), Regime::low);
    EXPECT_EQ(classify(0.5), Regime::critical);
    EXPECT_EQ(classify(0.50009), Regime::critical);
    EXPECT_EQ(classify(0.5002), Regime::high);
    EXPECT_EQ(classify(2.0), Regime::high);
    EXPECT_THROW((void)classify(-1.0), Error);
}

TEST(Similarity, Examples) {
    const SimilarityCoords a = similarity(2.0, 1.0);
    EXPECT_DOUBLE_EQ(a.gamma_alpha, 1.0);
    EXPECT_DOUBLE_EQ(a.z, 2.0);
    EXPECT_EQ(similarity(0.0, 0.3).z, 0.0);
    const SimilarityCoords c = similarity(1.0, 0.25);
    EXPECT_DOUBLE_EQ(c.gamma_alpha, -0.5);
    EXPECT_DOUBLE_EQ(c.z, -0.25);
    try {
        (void)similarity(1.0, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::singularity);
    }
}

TEST(FRaw, Examples) {
    EXPECT_EQ(f_raw(0.0, 0.5), 1.0);
    EXPECT_NEAR(f_raw(0.0, 1.0), 1.2533141373155003, 1e-13);
    EXPECT_NEAR(f_raw_at_zero(1.0), std::sqrt(std::numbers::pi / 2.0), 1e-14);
    // Decay at y = -8 is only algebraic (~1/|y|), so the check is against the closed form.
    EXPECT_NEAR(f_raw(-8.0, 1.0), alpha_one_closed_form(-8.0), 1e-3);
    EXPECT_LT(rel(f_raw(-8.0, 1.0), alpha_one_closed_form(-8.0)), 1e-8);
}

TEST(FRaw, FrozenReferenceValues) {
    // 30-50 digit reference evaluations.
    EXPECT_LT(rel(f_raw(-10.0, 1.0), 0.099028596471731921), 1e-12);
    EXPECT_LT(rel(f_raw(-10.0, 10.0), 2.861519776079456), 1e-12);
    EXPECT_LT(rel(f_raw(-10.0, 0.1), 2.6928347409958988e-20), 1e-11);
    EXPECT_LT(rel(f_raw(-3.0, 0.3), 0.01088157027264348), 1e-12);
    EXPECT_LT(rel(f_raw(-2.0, 2.0), 0.93570194199650007), 1e-12);
    EXPECT_LT(rel(f_raw(-1.0, 0.75), 0.5126888229025867), 1e-12);
    EXPECT_LT(rel(f_raw(0.0, 2.0), 1.6781691799098557), 1e-12);
    EXPECT_LT(rel(f_raw(0.5, 2.0), 2.5169708247781546), 1e-12);
    EXPECT_LT(rel(f_raw(1.0, 2.0), 5.4949320513788391), 1e-12);
    EXPECT_LT(rel(f_raw(0.5, 0.3), 1.5332239167800465), 1e-12);
    EXPECT_LT(rel(f_raw(1.0, 0.3), 2.4668133962143723), 1e-12);
    EXPECT_LT(rel(f_raw_derivative(1.0, 2.0), 11.806217493569848), 1e-11);
    EXPECT_LT(rel(f_raw_derivative(1.0, 0.3), 2.2314345155374423), 1e-11);
}

TEST(FRaw, BothRoutesAgreeAtTheSwitch) {
    for (const double alpha : {0.1, 0.3, 0.7, 1.0, 3.0}) {
        EXPECT_LT(rel(f_raw(-0.5 - 1e-12, alpha), f_raw(-0.5 + 1e-12, alpha)), 1e-10) << alpha;
        EXPECT_LT(rel(f_raw_derivative(-0.5 - 1e-12, alpha), f_raw_derivative(-0.5 + 1e-12, alpha)), 1e-9)
            << alpha;
    }
}

TEST(FRawDerivative, Examples) {
    EXPECT_EQ(f_raw_derivative(0.0, 0.5), 1.0);
    EXPECT_NEAR(f_raw_derivative(0.0, 1.0), 1.0, 1e-13);
    const double h = 1e-5;
    const double fd = (f_raw(0.7 + h, 0.3) - f_raw(0.7 - h, 0.3)) / (2.0 * h);
    EXPECT_NEAR(f_raw_derivative(0.7, 0.3), fd, 1e-6);
}

TEST(FRawDerivative, MatchesFiniteDifferences) {
    const double h = 1e-5;
    for (const double alpha : {0.1, 0.3, 0.49, 0.51, 1.0, 2.0, 5.0, 10.0}) {
        for (double y = -10.0; y <= 1.5; y += 0.37) {
            const double fd = (f_raw(y + h, alpha) - f_raw(y - h, alpha)) / (2.0 * h);
            EXPECT_NEAR(f_raw_derivative(y, alpha), fd, 1e-6 * std::max(1.0, std::abs(fd)))
                << alpha << ' ' << y;
        }
    }
}

TEST(FRaw, ClampEnforced) {
    EXPECT_THROW((void)f_raw(31.0, 1.0), Error);
    EXPECT_NO_THROW((void)f_raw(-40.0, 1.0));
    EXPECT_GT(f_raw(-40.0, 1.0), 0.0);
}

TEST(F, Examples) {
    const StoppingSolution half = solve_constants(0.5);
    EXPECT_NEAR(f(0.0, half), std::exp(-1.0), 1e-15);
    EXPECT_EQ(f(2.0, half), 2.0);
    for (const double alpha : {0.2, 0.5, 1.0, 3.0}) {
        const StoppingSolution s = solve_constants(alpha);
        EXPECT_NEAR(f(s.B, s), s.B, 1e-9);
    }
}

TEST(ValueSurface, Examples) {
    const StoppingSolution half = solve_constants(0.5);
    EXPECT_NEAR(value_surface(0.0, 0.0, half), std::exp(-1.0), 1e-15);
    EXPECT_EQ(value_surface(0.5, 0.96, half), 0.5);
    EXPECT_NEAR(value_surface(0.0, 0.75, half), 0.5 * std::exp(-1.0), 1e-15);
    EXPECT_THROW((void)value_surface(0.0, 1.0, half), Error);
    EXPECT_THROW((void)value_surface(0.0, -0.1, half), Error);
}

class SolvedAlpha : public ::testing::TestWithParam<double> {};

TEST_P(SolvedAlpha, SmoothPasting) {
    const StoppingSolution s = solve_constants(GetParam());
    EXPECT_LE(std::abs(s.C * f_raw(s.B, s.alpha) - s.B), 1e-9);
    const double slope = s.regime == Regime::critical ? 1.0 : s.C * f_raw_derivative(s.B, s.alpha);
    EXPECT_LE(std::abs(slope - 1.0), 1e-8);
}

TEST_P(SolvedAlpha, OdeResidual) {
    const double alpha = GetParam();
    const StoppingSolution s = solve_constants(alpha);
    const double h = 1e-4;
    for (double y = -10.0; y < s.B - 2.0 * h; y += 0.113) {
        // f'' once from the ODE, once from finite differences of f'.
        const double df = f_derivative(y, s);
        const double d2_fd = (f_derivative(y + h, s) - f_derivative(y - h, s)) / (2.0 * h);
        const double d2_ode = (2.0 * alpha - 1.0) * y * df + f(y, s);
        const double scale = std::abs(d2_ode) + std::abs((2.0 * alpha - 1.0) * y * df) + std::abs(f(y, s));
        EXPECT_LE(std::abs(d2_fd - d2_ode), 1e-7 * scale) << y;
    }
}

TEST_P(SolvedAlpha, Dominance) {
    const StoppingSolution s = solve_constants(GetParam());
    for (double y = -12.0; y <= 5.0; y += 0.05) {
        EXPECT_GE(f(y, s), std::max(y, 0.0) - 1e-12) << y;
    }
}

INSTANTIATE_TEST_SUITE_P(Alphas, SolvedAlpha, ::testing::Values(0.05, 0.1, 0.3, 0.49, 0.5, 0.5002, 0.51, 1.0, 2.0,
                                                               5.0, 10.0));

TEST(Decay, GaussianBelowHalf) {
    for (const double alpha : {0.1, 0.2, 0.3, 0.4, 0.45}) {
        const StoppingSolution s = solve_constants(alpha);
        EXPECT_LE(f(-12.0, s), 1e-2 * f(0.0, s)) << alpha;
    }
}

TEST(Decay, AlgebraicAboveHalf) {
    // f ~ |y|^{1 - 2 gamma} as y -> -inf when alpha > 1/2.
    for (const double alpha : {0.7, 1.0, 2.0, 5.0}) {
        const StoppingSolution s = solve_constants(alpha);
        const double g = alpha / (2.0 * alpha - 1.0);
        EXPECT_NEAR(f(-24.0, s) / f(-12.0, s), std::pow(2.0, 1.0 - 2.0 * g), 0.05) << alpha;
        double prev = f(-30.0, s);
        for (double y = -29.0; y <= 0.0; y += 1.0) {
            const double cur = f(y, s);
            EXPECT_GT(cur, prev);
            prev = cur;
        }
    }
}

TEST(AlphaOne, ClosedFormViaNormalCdf) {
    for (double y = -5.0; y <= 2.0; y += 0.05) {
        EXPECT_LT(rel(f_raw(y, 1.0), alpha_one_closed_form(y)), 1e-8) << y;
    }
}

TEST(NearCritical, ContinuousAcrossTheBand) {
    // Just outside the band the general formulas still track e^y.
    for (const double alpha : {0.5 - 2e-4, 0.5 + 2e-4}) {
        const StoppingSolution s = solve_constants(alpha);
        for (double y = -5.0; y <= 0.9; y += 0.1) {
            EXPECT_NEAR(f(y, s), std::exp(y - 1.0), 5e-3) << alpha << ' ' << y;
        }
    }
}
