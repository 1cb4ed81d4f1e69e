#pragma once

#include "abstop/stopping_solution.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace abstop {

/// Smallest alpha a sweep will evaluate; B(alpha) grows without bound as alpha -> 0.
inline constexpr double kSweepAlphaFloor = 0.01;

/// Upper end of the bracket search for B(alpha).
inline constexpr double kBoundaryBracketCap = 50.0;

/// V-consistency tolerance between the Gamma-ratio form and C f_raw(0).
inline constexpr double kValueConsistencyTol = 1e-10;

/// h(y, alpha) = f_raw(y) - y f_raw'(y); B(alpha) is its positive root.
[[nodiscard]] double boundary_residual(double y, double alpha);

/// Positive root B of h(., alpha), satisfying |h(B)| <= tol |f_raw(B)|.
/// Throws bracket_failure when no sign change appears up to kBoundaryBracketCap.
[[nodiscard]] double solve_boundary(double alpha, double tol = 1e-12);

/// (B, C, V) for alpha > 0. C = B / f_raw(B); V from the Gamma-ratio display,
/// cross-checked against C f_raw(0) (throws consistency on mismatch).
[[nodiscard]] StoppingSolution solve_constants(double alpha);

struct SweepRow {
    double alpha = 0.0;
    double B = 0.0;
    double C = 0.0;
    double V = 0.0;
    std::optional<std::string> error; // set when the solve for this alpha failed

    [[nodiscard]] bool ok() const noexcept { return !error.has_value(); }
};

/// solve_constants on a uniform alpha grid (alpha_min raised to kSweepAlphaFloor).
/// Per-row failures are recorded in the row, not thrown.
[[nodiscard]] std::vector<SweepRow> sweep(double alpha_min, double alpha_max, std::size_t points,
                                          unsigned workers = 0);

struct Extrema {
    double alpha_local_min = 0.0;
    double V_local_min = 0.0;
    double alpha_local_max = 0.0;
    double V_local_max = 0.0;
};

/// Interior local minimum and maximum of V over a sweep, each refined by
/// golden-section search on solve_constants(alpha).V to `alpha_tol`.
/// Throws not_found when V has no interior local minimum or maximum.
[[nodiscard]] Extrema locate_extrema(std::span<const SweepRow> rows, bool refine = true, double alpha_tol = 1e-4);

/// Minimizes a unimodal fn on [lo, hi] until the bracket is narrower than tol.
[[nodiscard]] double golden_section_minimize(const std::function<double(double)>& fn, double lo, double hi,
                                             double tol);

/// Header `alpha,B,C,V`; 17 significant digits; LF endings. Failed rows carry `nan`.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
[[nodiscard]] std::vector<SweepRow> read_sweep_csv(std::istream& in);

} // namespace abstop
