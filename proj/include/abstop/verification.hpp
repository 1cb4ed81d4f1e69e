#pragma once

// Independent checks of the closed-form solution. Nothing here calls into the
// Kummer-function stack except to obtain the quantity under test.

#include "abstop/stopping_solution.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace abstop {

struct VerificationReport {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// passed = (max_residual <= tolerance); a NaN residual fails.
[[nodiscard]] VerificationReport make_report(std::string name, double max_residual, double tolerance);

/// Standard normal CDF from the complementary error function.
[[nodiscard]] double normal_cdf(double y);

struct OdeSample {
    double y = 0.0;
    double f = 0.0;  // integrated solution, anchored so f(B) = B
    double df = 0.0; // integrated f'
};

/// Integrates the similarity ODE on [y_min, B] with an adaptive Dormand-Prince 5(4)
/// scheme and returns `samples` equally spaced points, the last at y = B.
///
/// The decaying solution is recessive toward -inf, so integrating f itself downward
/// from B amplifies round-off by up to e^{|z|}. The integrator instead carries the
/// log-derivative q = f'/f, which solves q' = (2 alpha - 1) y q + 1 - q^2 and is
/// contracting when integrated upward. It starts 10 units left of y_min at the
/// quasi-steady root of that Riccati equation; the start error decays at least
/// like e^{-2 dy}. f is then f(B) exp(-integral_y^B q) with f(B) = B.
[[nodiscard]] std::vector<OdeSample> integrate_similarity_ode(double alpha, double B, double y_min,
                                                              std::size_t samples = 401, double rel_tol = 1e-10);

/// Max relative deviation between the integrated f and the closed form on [y_min, B],
/// together with the smooth-pasting residual |B f'(B)/f(B) - 1| and a decay check.
[[nodiscard]] VerificationReport ode_oracle(double alpha, const StoppingSolution& solution, double y_min,
                                            double tolerance = 1e-6);

/// V_t - alpha x / (1 - t) V_x + V_xx / 2 at (x, t) by fourth-order central
/// differences of step h. The stencil reaches 2h in x and t.
[[nodiscard]] double pde_operator(const StoppingSolution& solution, double x, double t, double h);

/// Max |pde_operator| over the grid, normalized by max |V| on the grid. Every stencil
/// point must lie in the continuation region x < B sqrt(1 - t) and 0 <= t <= 0.95.
[[nodiscard]] VerificationReport pde_residual(const StoppingSolution& solution, std::span<const double> t_grid,
                                              std::span<const double> x_grid, double fd_step = 1e-3,
                                              double tolerance = 1e-4);

struct PdeGrid {
    std::vector<double> t;
    std::vector<double> x;
};

/// n x n rectangle t in [2h, 0.95], x in [-3, B sqrt(0.05 - 2h) - 3h], inside the
/// continuation region for every stencil point.
[[nodiscard]] PdeGrid continuation_grid(const StoppingSolution& solution, std::size_t n = 200, double h = 1e-3);

/// Limit checks as alpha decreases through `alphas` (descending, >= 0.01):
/// B strictly increasing, |C - 1/2| decreasing to <= 0.1, |V - 1/sqrt(2 pi)| decreasing to <= 0.02.
[[nodiscard]] std::vector<VerificationReport> limit_suite(std::span<const double> alphas);

/// Boundary for alpha = 1 by bisection on the smooth-pasting condition of
/// sqrt(2 pi) e^{y^2/2} Phi(y).
[[nodiscard]] double alpha_one_boundary_oracle();

/// Recurrence, derivative relations, asymptotics and Kummer-equation residuals of
/// M, U and W on `points` randomized parameter triples each.
[[nodiscard]] std::vector<VerificationReport> special_function_identities(std::size_t points = 1000,
                                                                          std::uint64_t seed = 20140601);

struct SuiteOptions {
    double tol_scale = 1.0;
    std::size_t mc_paths = 100000;
    std::size_t mc_steps = 4000;
    std::uint64_t seed = 1;
};

/// Every analytic, oracle and Monte Carlo check.
[[nodiscard]] std::vector<VerificationReport> run_verification_suite(const SuiteOptions& options);

/// JSON array of {name, max_residual, tolerance, passed}.
[[nodiscard]] std::string to_json(std::span<const VerificationReport> reports);

} // namespace abstop
