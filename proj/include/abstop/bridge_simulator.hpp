#pragma once

// Monte Carlo for the alpha-Brownian bridge dX = dW - alpha X / (1 - t) dt, X_0 = 0.
//
// Paths are sampled from the exact Gaussian transition of
//   X_t = integral_0^t ((1 - t) / (1 - s))^alpha dW_s,
// so the only bias left is from monitoring the stopping boundary at grid points.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace abstop {

enum class GridKind {
    uniform,   // t_k = k / n
    geometric, // t_k = 1 - (1 - k/n)^2, refined toward t = 1
};

struct PathConfig {
    double alpha = 1.0;
    std::size_t n_steps = 4000;
    GridKind grid = GridKind::geometric;
    std::uint64_t seed = 0;
};

struct PathPoint {
    double t = 0.0;
    double x = 0.0;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    double analytic_v = 0.0;
    double z_score = 0.0;        // (mean - analytic_v) / std_error; 0 when std_error == 0
    double mean_stop_time = 0.0; // sample mean of the stopping time (1 when never stopped)
};

/// Strictly increasing grid with t_0 = 0 and t_n = 1. Requires n_steps >= 2.
[[nodiscard]] std::vector<double> time_grid(std::size_t n_steps, GridKind kind);

/// ((1 - t_next) / (1 - t))^alpha, the conditional mean factor.
[[nodiscard]] double transition_decay(double t, double t_next, double alpha);

/// Conditional variance of X_{t_next} given X_t.
[[nodiscard]] double transition_variance(double t, double t_next, double alpha);

/// One exact transition step driven by a standard normal draw.
[[nodiscard]] double step_exact(double x, double t, double t_next, double noise, double alpha);

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
[[nodiscard]] std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                                     std::array<std::uint32_t, 2> key);

/// Standard normal draws for one path. Draw k depends only on (seed, path, k).
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path_index);

    double operator()();

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t path_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Path over the configured grid. `noise()` supplies one standard normal per step.
template <class Noise>
[[nodiscard]] std::vector<PathPoint> simulate_path(const PathConfig& config, Noise&& noise) {
    const std::vector<double> grid = time_grid(config.n_steps, config.grid);
    std::vector<PathPoint> path;
    path.reserve(grid.size());
    path.push_back({0.0, 0.0});
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double x = step_exact(path.back().x, grid[k - 1], grid[k], noise(), config.alpha);
        path.push_back({grid[k], x});
    }
    return path;
}

/// Path `path_index` of the configured stream.
[[nodiscard]] std::vector<PathPoint> simulate_path(const PathConfig& config, std::uint64_t path_index);

/// First grid point with x >= B sqrt(1 - t); the terminal point when none.
[[nodiscard]] PathPoint first_crossing(std::span<const PathPoint> path, double B);

/// Payoff X at the first crossing of B sqrt(1 - t), else the terminal state.
[[nodiscard]] double stopped_payoff(std::span<const PathPoint> path, double B);

/// Mean stopped payoff over paths 0..n_paths-1. The result is bit-identical for
/// any worker count. Requires n_paths >= 100.
[[nodiscard]] McEstimate estimate_value(const PathConfig& config, double B, std::size_t n_paths,
                                        double analytic_v, unsigned workers = 0);

/// Order-fixed pairwise summation.
[[nodiscard]] double pairwise_sum(std::span<const double> values);

} // namespace abstop
