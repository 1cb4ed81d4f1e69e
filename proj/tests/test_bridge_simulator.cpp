#include "abstop/boundary_solver.hpp"
#include "abstop/bridge_simulator.hpp"
#include "abstop/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace abstop;

namespace {

double marginal_variance(double t, double alpha) {
    const double slope = 2.0 * alpha - 1.0;
    const double integral = slope == 0.0 ? -std::log(1.0 - t) : std::expm1(-slope * std::log1p(-t)) / slope;
    return std::pow(1.0 - t, 2.0 * alpha) * integral;
}

} // namespace

TEST(Philox, KnownAnswerVectors) {
    using Ctr = std::array<std::uint32_t, 4>;
    EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (Ctr{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (Ctr{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (Ctr{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(NormalStream, DependsOnlyOnSeedAndPath) {
    NormalStream a(9, 17);
    NormalStream b(9, 17);
    NormalStream c(9, 18);
    bool differs = false;
    for (int i = 0; i < 101; ++i) {
        const double x = a();
        EXPECT_EQ(x, b());
        differs = differs || x != c();
    }
    EXPECT_TRUE(differs);
}

TEST(NormalStream, MomentsAreStandard) {
    NormalStream s(1, 0);
    const int n = 200000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s();
        sum += x;
        sq += x * x;
    }
    EXPECT_NEAR(sum / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(sq / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(TimeGrid, Shapes) {
    const auto u = time_grid(4, GridKind::uniform);
    EXPECT_EQ(u, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
    const auto g = time_grid(4, GridKind::geometric);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 1.0);
    EXPECT_DOUBLE_EQ(g[2], 0.75);
    for (std::size_t k = 1; k < g.size(); ++k) {
        EXPECT_LT(g[k - 1], g[k]);
        if (k > 1) {
            EXPECT_LT(g[k] - g[k - 1], g[k - 1] - (k >= 2 ? g[k - 2] : 0.0));
        }
    }
    EXPECT_THROW((void)time_grid(1, GridKind::uniform), Error);
}

TEST(StepExact, Examples) {
    EXPECT_EQ(step_exact(0.7, 0.9, 1.0, 1.3, 2.0), 0.0);
    EXPECT_EQ(step_exact(0.0, 0.2, 0.3, 0.0, 1.0), 0.0);
    EXPECT_EQ(step_exact(0.4, 0.2, 0.3, 0.0, 0.0), 0.4);
    EXPECT_THROW((void)step_exact(0.0, 0.5, 0.4, 0.0, 1.0), Error);
    EXPECT_THROW((void)step_exact(0.0, 0.1, 0.4, 0.0, -1.0), Error);
}

TEST(Transition, HalfIsLogLimit) {
    const double below = transition_variance(0.3, 0.6, 0.5 - 1e-7);
    const double at = transition_variance(0.3, 0.6, 0.5);
    EXPECT_NEAR(below, at, 1e-7);
    EXPECT_NEAR(at, 0.4 * std::log(0.7 / 0.4), 1e-15);
}

TEST(Transition, ComposesToMarginal) {
    for (const double alpha : {0.3, 0.5, 1.0, 2.0}) {
        const auto grid = time_grid(50, GridKind::geometric);
        double var = 0.0;
        for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
            const double d = transition_decay(grid[k - 1], grid[k], alpha);
            var = d * d * var + transition_variance(grid[k - 1], grid[k], alpha);
            EXPECT_NEAR(var, marginal_variance(grid[k], alpha), 1e-13) << alpha << ' ' << grid[k];
        }
    }
}

TEST(SimulatePath, Examples) {
    PathConfig config;
    config.alpha = 1.0;
    config.n_steps = 200;
    config.seed = 5;
    for (std::uint64_t p = 0; p < 10; ++p) {
        EXPECT_EQ(simulate_path(config, p).back().x, 0.0);
    }
    const auto zero = simulate_path(config, [] { return 0.0; });
    for (const PathPoint& pt : zero) {
        EXPECT_EQ(pt.x, 0.0);
    }
}

TEST(SimulatePath, AlphaZeroIsBrownian) {
    PathConfig config;
    config.alpha = 0.0;
    config.n_steps = 100;
    config.grid = GridKind::uniform;
    const auto grid = time_grid(config.n_steps, config.grid);
    double total = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        EXPECT_EQ(transition_decay(grid[k - 1], grid[k], 0.0), 1.0);
        total += transition_variance(grid[k - 1], grid[k], 0.0);
        EXPECT_NEAR(total, grid[k], 1e-12);
    }
}

TEST(SimulatePath, MarginalVarianceMatches) {
    for (const double alpha : {0.3, 0.5, 1.0, 2.0}) {
        PathConfig config;
        config.alpha = alpha;
        config.n_steps = 100;
        config.grid = GridKind::uniform;
        config.seed = 77;
        const int n = 20000;
        std::vector<double> sum(4, 0.0), sq(4, 0.0);
        for (int p = 0; p < n; ++p) {
            const auto path = simulate_path(config, static_cast<std::uint64_t>(p));
            for (int j = 0; j < 4; ++j) {
                const double x = path[20 * (j + 1)].x;
                sum[j] += x;
                sq[j] += x * x;
            }
        }
        for (int j = 0; j < 4; ++j) {
            const double mean = sum[j] / n;
            const double var = (sq[j] - n * mean * mean) / (n - 1);
            const double expected = marginal_variance(0.2 * (j + 1), alpha);
            EXPECT_NEAR(var, expected, 4.0 * expected * std::sqrt(2.0 / (n - 1))) << alpha << ' ' << j;
        }
    }
}

TEST(StoppedPayoff, Examples) {
    std::vector<PathPoint> never{{0.0, 0.0}, {0.5, -0.2}, {1.0, 0.0}};
    EXPECT_EQ(stopped_payoff(never, 1.0), 0.0);
    EXPECT_EQ(first_crossing(never, 1.0).t, 1.0);
    std::vector<PathPoint> crossing{{0.0, 0.0}, {0.5, 0.3}, {0.75, 0.6}, {0.9, 0.1}, {1.0, 0.0}};
    EXPECT_EQ(stopped_payoff(crossing, 1.0), 0.6);
    EXPECT_EQ(first_crossing(crossing, 1.0).t, 0.75);
    EXPECT_LT(crossing.front().x, 1.0);
    EXPECT_THROW((void)stopped_payoff(std::vector<PathPoint>{}, 1.0), Error);
}

TEST(PairwiseSum, OrderFixed) {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = 1.0 / static_cast<double>(i + 1);
    }
    EXPECT_EQ(pairwise_sum(v), pairwise_sum(v));
    EXPECT_NEAR(pairwise_sum(v), 7.485470860550345, 1e-13);
    EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(EstimateValue, MatchesSlowPath) {
    PathConfig config;
    config.alpha = 1.3;
    config.n_steps = 300;
    config.seed = 11;
    const double B = solve_boundary(config.alpha);
    const std::size_t n = 257;
    std::vector<double> payoff(n);
    for (std::size_t i = 0; i < n; ++i) {
        payoff[i] = stopped_payoff(simulate_path(config, i), B);
    }
    const McEstimate mc = estimate_value(config, B, n, 0.0, 1);
    EXPECT_EQ(mc.mean, pairwise_sum(payoff) / static_cast<double>(n));
    EXPECT_EQ(mc.n_paths, n);
}

TEST(EstimateValue, WorkerCountInvariant) {
    PathConfig config;
    config.alpha = 2.0;
    config.n_steps = 500;
    config.seed = 3;
    const double B = solve_boundary(config.alpha);
    const McEstimate a = estimate_value(config, B, 5000, 0.3, 1);
    const McEstimate b = estimate_value(config, B, 5000, 0.3, 3);
    const McEstimate c = estimate_value(config, B, 5000, 0.3, 8);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.mean, c.mean);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_EQ(a.mean_stop_time, c.mean_stop_time);
    EXPECT_EQ(a.z_score, c.z_score);
}

TEST(EstimateValue, Domain) {
    PathConfig config;
    EXPECT_THROW((void)estimate_value(config, 1.0, 99, 0.0), Error);
    config.alpha = -1.0;
    EXPECT_THROW((void)estimate_value(config, 1.0, 1000, 0.0), Error);
}

TEST(EstimateValue, AlphaZeroIsMartingaleUnderAnyRule) {
    PathConfig config;
    config.alpha = 0.0;
    config.n_steps = 1000;
    config.seed = 8;
    for (const double B : {0.25, 1.0, 2.5}) {
        const McEstimate mc = estimate_value(config, B, 20000, 0.0);
        EXPECT_LE(std::abs(mc.mean), 3.0 * mc.std_error) << B;
    }
}

TEST(EstimateValue, SolvedBoundaryBeatsPerturbations) {
    PathConfig config;
    config.alpha = 1.0;
    config.n_steps = 1000;
    config.seed = 21;
    const double B = solve_boundary(1.0);
    const McEstimate best = estimate_value(config, B, 20000, 0.0);
    for (const double scale : {0.8, 1.2}) {
        const McEstimate other = estimate_value(config, scale * B, 20000, 0.0);
        const double combined = std::hypot(best.std_error, other.std_error);
        EXPECT_LE(other.mean, best.mean + 3.0 * combined) << scale;
    }
}

TEST(EstimateValue, CriticalCaseFullSize) {
    PathConfig config;
    config.alpha = 0.5;
    config.n_steps = 4000;
    config.grid = GridKind::geometric;
    config.seed = 42;
    const McEstimate mc = estimate_value(config, 1.0, 100000, std::exp(-1.0));
    EXPECT_LE(std::abs(mc.mean - std::exp(-1.0)), 3.0 * mc.std_error);
    EXPECT_NEAR(mc.z_score, (mc.mean - std::exp(-1.0)) / mc.std_error, 1e-12);
    EXPECT_GT(mc.mean_stop_time, 0.0);
    EXPECT_LE(mc.mean_stop_time, 1.0);
}
