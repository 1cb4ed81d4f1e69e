#pragma once

// Similarity-form solution f(y, alpha) of the reduced free-boundary ODE
//
//   f'' - (2 alpha - 1) y f' - f = 0   for y < B(alpha),   f = y   for y >= B(alpha),
//
// and the value surface V(x, t, alpha) = sqrt(1 - t) f(x / sqrt(1 - t), alpha).

#include "abstop/stopping_solution.hpp"

namespace abstop {

/// Half-width of the alpha band around 1/2 routed to the closed form e^(y-1).
inline constexpr double kCriticalBand = 1e-4;

/// |y| beyond which f is extended by its leading asymptotic term.
inline constexpr double kSimilarityClamp = 30.0;

[[nodiscard]] Regime classify(double alpha);

struct SimilarityCoords {
    double y = 0.0;           // x / sqrt(1 - t)
    double gamma_alpha = 0.0; // alpha / (2 alpha - 1)
    double z = 0.0;           // y^2 (2 alpha - 1) / 2
};

/// Throws ErrorKind::singularity at alpha = 1/2, where gamma(alpha) is undefined.
[[nodiscard]] SimilarityCoords similarity(double y, double alpha);

/// f(y, alpha) / C(alpha): the decaying ODE solution without its normalization.
/// At alpha = 1/2 (and within kCriticalBand of it) this is e^y.
[[nodiscard]] double f_raw(double y, double alpha);

/// d/dy f_raw(y, alpha).
[[nodiscard]] double f_raw_derivative(double y, double alpha);

/// Continuation-region constant f_raw(0, alpha) in its Gamma-ratio form.
[[nodiscard]] double f_raw_at_zero(double alpha);

/// C f_raw(y) below the boundary, y above it.
[[nodiscard]] double f(double y, const StoppingSolution& solution);

/// d/dy of f(y, solution); 1 on the stopping region.
[[nodiscard]] double f_derivative(double y, const StoppingSolution& solution);

/// V(x, t) for 0 <= t < 1.
[[nodiscard]] double value_surface(double x, double t, const StoppingSolution& solution);

} // namespace abstop
