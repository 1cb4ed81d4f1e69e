#pragma once

// Real-argument Gamma function and confluent hypergeometric functions.
//
//   M(g, b, z)  Kummer's function, sum_n g^(n) z^n / (b^(n) n!)
//   U(g, b, z)  second-kind solution decaying like z^-g as z -> +inf  (z > 0)
//   W(g, b, z)  second-kind solution decaying to 0 as z -> -inf       (z < 0)
//
// All three solve z g'' + (b - z) g' - g*g = 0 in z.

#include <cstdint>

namespace abstop {

/// Parameter triple of a Kummer-type evaluation.
struct KummerArgs {
    double gamma = 0.0; // first parameter
    double beta = 0.0;  // second parameter
    double z = 0.0;     // argument
};

/// Value plus diagnostics for callers that care how it was obtained.
struct SpecialValue {
    double value = 0.0;
    bool asymptotic = false;   // |z| beyond the series range; leading asymptotic term returned
    bool cancellation = false; // combined terms differed from the result by >= 12 orders
};

/// Largest |z| evaluated by summation (with the Kummer transformation for z < 0).
inline constexpr double kKummerZMax = 700.0;

[[nodiscard]] double gamma_fn(double x);

/// ln|Gamma(x)|. Throws at poles.
[[nodiscard]] double log_gamma(double x);

/// Sign of Gamma(x) (+1 or -1). Throws at poles.
[[nodiscard]] double gamma_sign(double x);

/// Gamma(num) / Gamma(den), finite even when both factors overflow.
/// A pole in the denominator yields 0; a pole in the numerator throws.
[[nodiscard]] double gamma_ratio(double num, double den);

/// 1 / Gamma(x); zero at the poles.
[[nodiscard]] double reciprocal_gamma(double x);

/// Rising factorial g (g+1) ... (g+n-1).
[[nodiscard]] double pochhammer(double g, std::uint32_t n);

[[nodiscard]] SpecialValue kummer_m_detailed(const KummerArgs& args);
[[nodiscard]] double kummer_m(const KummerArgs& args);

/// dM/dz = (g/b) M(g+1, b+1, z).
[[nodiscard]] double kummer_m_derivative(const KummerArgs& args);

[[nodiscard]] SpecialValue tricomi_u_detailed(const KummerArgs& args);
[[nodiscard]] double tricomi_u(const KummerArgs& args);

/// dU/dz = -g U(g+1, b+1, z).
[[nodiscard]] double tricomi_u_derivative(const KummerArgs& args);

/// ln U(g, b, z) for g > 0, z > 0, where U > 0. Stays finite when U itself
/// would under- or overflow.
[[nodiscard]] double log_tricomi_u(const KummerArgs& args);

[[nodiscard]] SpecialValue kummer_w_detailed(const KummerArgs& args);
[[nodiscard]] double kummer_w(const KummerArgs& args);

/// dW/dz = g W(g+1, b+1, z).
[[nodiscard]] double kummer_w_derivative(const KummerArgs& args);

} // namespace abstop
