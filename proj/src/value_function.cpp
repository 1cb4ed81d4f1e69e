#include "abstop/value_function.hpp"

#include "abstop/error.hpp"
#include "abstop/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace abstop {
namespace {

// Left of this point the two M terms cancel catastrophically; the decaying
// U (alpha > 1/2) or W (alpha < 1/2) representation is used instead.
constexpr double kDecayingFormSwitch = -0.5;

const double kLogTwoSqrtPi = std::log(2.0 * std::sqrt(std::numbers::pi));

void require_positive_alpha(double alpha, const char* where) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorKind::domain, std::string(where) + ": requires alpha > 0");
    }
}

// Theorem form: y M(g, 3/2, z) + k M(g - 1/2, 1/2, z).
double f_raw_kummer(double y, double alpha) {
    const SimilarityCoords s = similarity(y, alpha);
    const double k = f_raw_at_zero(alpha);
    return y * kummer_m({s.gamma_alpha, 1.5, s.z}) + k * kummer_m({s.gamma_alpha - 0.5, 0.5, s.z});
}

// M(g,3/2,z) + (2 alpha / 3) y^2 M(g+1,5/2,z) + k y M(g+1/2,3/2,z).
double f_raw_derivative_kummer(double y, double alpha) {
    const SimilarityCoords s = similarity(y, alpha);
    const double g = s.gamma_alpha;
    const double k = f_raw_at_zero(alpha);
    return kummer_m({g, 1.5, s.z}) + 2.0 * alpha * y * y / 3.0 * kummer_m({g + 1.0, 2.5, s.z}) +
           k * y * kummer_m({g + 0.5, 1.5, s.z});
}

// For y < 0 the bracket collapses to one decaying second-kind term:
//   alpha > 1/2:  |y| Gamma(g - 1/2) / (2 sqrt(pi)) U(g, 3/2, z)
//   alpha < 1/2: -|y| sqrt(pi) / (2 Gamma(3/2 - g)) W(g, 3/2, z)
//              =  |y| Gamma(1 - g) / (2 sqrt(pi)) e^z U(3/2 - g, 3/2, -z)
// Returned in log form; both are positive.
double log_f_raw_decaying(double y, double alpha) {
    const SimilarityCoords s = similarity(y, alpha);
    const double g = s.gamma_alpha;
    const double log_abs_y = std::log(-y);
    if (alpha > 0.5) {
        return log_abs_y + log_gamma(g - 0.5) - kLogTwoSqrtPi + log_tricomi_u({g, 1.5, s.z});
    }
    return log_abs_y + log_gamma(1.0 - g) - kLogTwoSqrtPi + s.z + log_tricomi_u({1.5 - g, 1.5, -s.z});
}

//   alpha > 1/2:  Gamma(g - 1/2) / (2 sqrt(pi)) [alpha y^2 U(g+1, 5/2, z) - U(g, 3/2, z)]
//   alpha < 1/2:  Gamma(1 - g) e^z / (2 sqrt(pi)) [2w U(a, 5/2, w) - U(a, 3/2, w)],
//                 a = 3/2 - g, w = -z
double f_raw_derivative_decaying(double y, double alpha) {
    const SimilarityCoords s = similarity(y, alpha);
    const double g = s.gamma_alpha;
    if (alpha > 0.5) {
        const double log_u = log_tricomi_u({g, 1.5, s.z});
        const double log_u_shift = log_tricomi_u({g + 1.0, 2.5, s.z});
        const double log_scale = log_gamma(g - 0.5) - kLogTwoSqrtPi + log_u;
        return std::exp(log_scale) * std::expm1(std::log(alpha * y * y) + log_u_shift - log_u);
    }
    const double a = 1.5 - g;
    const double w = -s.z;
    const double log_u = log_tricomi_u({a, 1.5, w});
    const double log_u_shift = log_tricomi_u({a, 2.5, w});
    const double log_scale = s.z + log_gamma(1.0 - g) - kLogTwoSqrtPi + log_u;
    return std::exp(log_scale) * std::expm1(std::log(2.0 * w) + log_u_shift - log_u);
}

// Leading-order tail for y < -kSimilarityClamp, from U(a, b, w) ~ w^-a.
double log_f_raw_tail(double y, double alpha) {
    const SimilarityCoords s = similarity(y, alpha);
    const double g = s.gamma_alpha;
    const double log_abs_y = std::log(-y);
    if (alpha > 0.5) {
        return log_abs_y + log_gamma(g - 0.5) - kLogTwoSqrtPi - g * std::log(s.z);
    }
    return log_abs_y + log_gamma(1.0 - g) - kLogTwoSqrtPi + s.z - (1.5 - g) * std::log(-s.z);
}

double f_raw_tail_log_derivative(double y, double alpha) {
    const double g = alpha / (2.0 * alpha - 1.0);
    if (alpha > 0.5) {
        return (1.0 - 2.0 * g) / y;
    }
    return 1.0 / y + (2.0 * alpha - 1.0) * y - 2.0 * (1.5 - g) / y;
}

} // namespace

Regime classify(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorKind::domain, "classify: alpha must be finite and >= 0");
    }
    if (alpha == 0.0) {
        return Regime::zero;
    }
    if (std::abs(alpha - 0.5) < kCriticalBand) {
        return Regime::critical;
    }
    return alpha < 0.5 ? Regime::low : Regime::high;
}

SimilarityCoords similarity(double y, double alpha) {
    const double slope = 2.0 * alpha - 1.0;
    if (slope == 0.0) {
        throw Error(ErrorKind::singularity, "similarity: gamma(alpha) is undefined at alpha = 1/2");
    }
    return {y, alpha / slope, y * y * slope / 2.0};
}

double f_raw_at_zero(double alpha) {
    require_positive_alpha(alpha, "f_raw_at_zero");
    if (classify(alpha) == Regime::critical) {
        return 1.0;
    }
    const double g = alpha / (2.0 * alpha - 1.0);
    if (alpha < 0.5) {
        return gamma_ratio(1.0 - g, 1.5 - g) / std::sqrt(2.0 * (1.0 - 2.0 * alpha));
    }
    return gamma_ratio(g - 0.5, g) / std::sqrt(2.0 * (2.0 * alpha - 1.0));
}

double f_raw(double y, double alpha) {
    require_positive_alpha(alpha, "f_raw");
    if (classify(alpha) == Regime::critical) {
        return std::exp(y);
    }
    if (y > kSimilarityClamp) {
        throw Error(ErrorKind::domain, "f_raw: y beyond the evaluation clamp");
    }
    if (y >= kDecayingFormSwitch) {
        return f_raw_kummer(y, alpha);
    }
    if (y < -kSimilarityClamp) {
        return std::exp(log_f_raw_tail(y, alpha));
    }
    return std::exp(log_f_raw_decaying(y, alpha));
}

double f_raw_derivative(double y, double alpha) {
    require_positive_alpha(alpha, "f_raw_derivative");
    if (classify(alpha) == Regime::critical) {
        return std::exp(y);
    }
    if (y > kSimilarityClamp) {
        throw Error(ErrorKind::domain, "f_raw_derivative: y beyond the evaluation clamp");
    }
    if (y >= kDecayingFormSwitch) {
        return f_raw_derivative_kummer(y, alpha);
    }
    if (y < -kSimilarityClamp) {
        return std::exp(log_f_raw_tail(y, alpha)) * f_raw_tail_log_derivative(y, alpha);
    }
    return f_raw_derivative_decaying(y, alpha);
}

double f(double y, const StoppingSolution& solution) {
    if (y >= solution.B) {
        return y;
    }
    return solution.C * f_raw(y, solution.alpha);
}

double f_derivative(double y, const StoppingSolution& solution) {
    if (y >= solution.B) {
        return 1.0;
    }
    return solution.C * f_raw_derivative(y, solution.alpha);
}

double value_surface(double x, double t, const StoppingSolution& solution) {
    if (!(t >= 0.0 && t < 1.0)) {
        throw Error(ErrorKind::domain, "value_surface: requires 0 <= t < 1");
    }
    const double scale = std::sqrt(1.0 - t);
    if (x >= solution.B * scale) {
        return x;
    }
    return scale * f(x / scale, solution);
}

} // namespace abstop
