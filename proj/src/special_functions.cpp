#include "abstop/special_functions.hpp"

#include "abstop/error.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace abstop {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

constexpr int kSeriesTermCap = 10000;
constexpr double kSeriesRelTol = 1e-16;
constexpr double kTransformThreshold = 4.0;
constexpr double kCancellationRatio = 1e12;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::nearbyint(x); }

bool is_integer(double x) { return x == std::nearbyint(x); }

// sin(pi x) with exact argument reduction.
double sin_pi(double x) {
    const double r = x - 2.0 * std::nearbyint(0.5 * x); // r in [-1, 1]
    if (r == 0.0 || std::abs(r) == 1.0) {
        return 0.0;
    }
    if (r > 0.5) {
        return std::sin(kPi * (1.0 - r));
    }
    if (r < -0.5) {
        return -std::sin(kPi * (1.0 + r));
    }
    return std::sin(kPi * r);
}

double lanczos_sum(double zm1) {
    double sum = kLanczosCoefficients[0];
    for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i) {
        sum += kLanczosCoefficients[i] / (zm1 + static_cast<double>(i));
    }
    return sum;
}

// ln Gamma(x) for x >= 0.5.
double log_gamma_positive(double x) {
    const double zm1 = x - 1.0;
    const double t = zm1 + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (zm1 + 0.5) * std::log(t) - t + std::log(lanczos_sum(zm1));
}

void require_not_pole(double x, const char* where) {
    if (is_nonpositive_integer(x)) {
        throw Error(ErrorKind::pole, std::string(where) + ": Gamma pole at x = " + std::to_string(x));
    }
}

struct SeriesResult {
    double sum = 0.0;
    double max_term = 0.0;
};

// Direct Taylor summation of M(g, b, z).
SeriesResult kummer_series(double g, double b, double z) {
    SeriesResult out{1.0, 1.0};
    double term = 1.0;
    int small_run = 0;
    for (int n = 0; n < kSeriesTermCap; ++n) {
        term *= (g + n) / (b + n) * z / (n + 1.0);
        out.sum += term;
        out.max_term = std::max(out.max_term, std::abs(term));
        if (term == 0.0) {
            return out; // g is a non-positive integer: polynomial
        }
        if (std::abs(term) <= kSeriesRelTol * std::abs(out.sum)) {
            if (++small_run >= 3) {
                return out;
            }
        } else {
            small_run = 0;
        }
    }
    throw Error(ErrorKind::non_convergence,
                "kummer_m: series did not converge within " + std::to_string(kSeriesTermCap) + " terms");
}

// Leading asymptotic terms for |z| beyond kKummerZMax.
double kummer_m_asymptotic(double g, double b, double z) {
    double log_mag = 0.0;
    double sign = gamma_sign(b);
    if (z > 0.0) {
        const double rg = reciprocal_gamma(g);
        if (rg == 0.0) {
            return 0.0; // unreachable: polynomial case is summed directly
        }
        sign *= rg > 0.0 ? 1.0 : -1.0;
        log_mag = log_gamma(b) - log_gamma(g) + z + (g - b) * std::log(z);
    } else {
        const double rg = reciprocal_gamma(b - g);
        if (rg == 0.0) {
            return 0.0;
        }
        sign *= rg > 0.0 ? 1.0 : -1.0;
        log_mag = log_gamma(b) - log_gamma(b - g) - g * std::log(-z);
    }
    const double value = sign * std::exp(log_mag);
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::overflow, "kummer_m: asymptotic value exceeds double range");
    }
    return value;
}

// ln U(a, b, w) for a > 0, w > 0 from the Laplace integral
//   Gamma(a) U(a, b, w) = integral_0^inf e^-wt t^(a-1) (1 + t)^(b-a-1) dt.
// For w >= 1 it is rescaled to u = w t so the decay scale is 1; either way the kink of
// (1 + t)^(b-a-1) and the exponential cutoff stay within a few decades of each other.
// The log-integrand is shifted by its interior maximum so the quadrature sees O(1)
// values for any a.
double log_tricomi_u_integral(double a, double b, double w) {
    const double c = b - a - 1.0;
    const double scale = w >= 1.0 ? 1.0 / w : 1.0; // t = scale * v
    auto log_integrand = [=](double v) {
        const double t = scale * v;
        return (a - 1.0) * std::log(v) - w * t + c * std::log1p(t);
    };
    double shift = 0.0;
    double peak = 0.0;
    if (a > 1.0) {
        // Stationary point in t: w t^2 - (b - 2 - w) t - (a - 1) = 0.
        const double p = b - 2.0 - w;
        const double peak_wt = 0.5 * (p + std::sqrt(p * p + 4.0 * (a - 1.0) * w));
        peak = peak_wt / w / scale;
        shift = log_integrand(peak);
    }
    auto integrand = [&](double v) -> double {
        if (v <= 0.0) {
            return 0.0;
        }
        return std::exp(log_integrand(v) - shift);
    };
    thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> finite_integrator;
    if (a >= 1.0) {
        // Split at the peak, which for large a is narrow and far from the origin.
        double head_error = 0.0;
        double head_l1 = 0.0;
        const double head_value =
            peak > 0.0 ? finite_integrator.integrate(integrand, 0.0, peak, 1e-15, &head_error, &head_l1) : 0.0;
        value = head_value +
                integrator.integrate(integrand, peak, std::numeric_limits<double>::infinity(), 1e-15, &error, &l1);
        error += head_error;
        l1 += head_l1;
    } else {
        // v^(a-1) is nearly non-integrable for small a: on [0, 1] substitute v = s^(1/a),
        // v^(a-1) dv = ds / a, which leaves a bounded integrand.
        auto head = [&](double s) -> double {
            const double t = scale * std::pow(s, 1.0 / a);
            return std::exp(-w * t + c * std::log1p(t)) / a;
        };
        double head_error = 0.0;
        double head_l1 = 0.0;
        const double head_value = finite_integrator.integrate(head, 0.0, 1.0, 1e-15, &head_error, &head_l1);
        const double tail_value = integrator.integrate(integrand, 1.0, std::numeric_limits<double>::infinity(),
                                                       1e-15, &error, &l1);
        value = head_value + tail_value;
        error += head_error;
        l1 += head_l1;
    }
    if (!(value > 0.0) || !std::isfinite(value) || error > 1e-12 * l1) {
        throw Error(ErrorKind::non_convergence, "tricomi_u: Laplace integral did not converge");
    }
    return std::log(value) + shift + a * std::log(scale) - log_gamma(a);
}

} // namespace

double gamma_fn(double x) {
    require_not_pole(x, "gamma_fn");
    if (!std::isfinite(x)) {
        throw Error(ErrorKind::domain, "gamma_fn: non-finite argument");
    }
    if (x < 0.5) {
        const double g = gamma_fn(1.0 - x);
        if (std::isinf(g)) {
            return 0.0 * sin_pi(x); // 1-x beyond overflow: Gamma(x) underflows
        }
        return kPi / (sin_pi(x) * g);
    }
    const double zm1 = x - 1.0;
    const double t = zm1 + kLanczosG + 0.5;
    // Split the power so t^(x-1/2) does not overflow before e^-t compensates.
    const double half_pow = std::pow(t, 0.5 * (zm1 + 0.5));
    const double value = std::sqrt(2.0 * kPi) * half_pow * (half_pow * std::exp(-t)) * lanczos_sum(zm1);
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::overflow, "gamma_fn: Gamma(" + std::to_string(x) + ") exceeds double range");
    }
    return value;
}

double log_gamma(double x) {
    require_not_pole(x, "log_gamma");
    if (x >= 0.5) {
        return log_gamma_positive(x);
    }
    return std::log(kPi / std::abs(sin_pi(x))) - log_gamma_positive(1.0 - x);
}

double gamma_sign(double x) {
    require_not_pole(x, "gamma_sign");
    if (x > 0.0) {
        return 1.0;
    }
    return sin_pi(x) > 0.0 ? 1.0 : -1.0;
}

double reciprocal_gamma(double x) {
    if (is_nonpositive_integer(x)) {
        return 0.0;
    }
    if (std::abs(x) < 170.0) {
        return 1.0 / gamma_fn(x);
    }
    return gamma_sign(x) * std::exp(-log_gamma(x));
}

double gamma_ratio(double num, double den) {
    require_not_pole(num, "gamma_ratio");
    if (is_nonpositive_integer(den)) {
        return 0.0;
    }
    if (std::abs(num) < 170.0 && std::abs(den) < 170.0) {
        return gamma_fn(num) / gamma_fn(den);
    }
    const double value = gamma_sign(num) * gamma_sign(den) * std::exp(log_gamma(num) - log_gamma(den));
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::overflow, "gamma_ratio: quotient exceeds double range");
    }
    return value;
}

double pochhammer(double g, std::uint32_t n) {
    double value = 1.0;
    for (std::uint32_t k = 0; k < n; ++k) {
        value *= g + k;
    }
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::overflow, "pochhammer: rising factorial exceeds double range");
    }
    return value;
}

SpecialValue kummer_m_detailed(const KummerArgs& args) {
    const auto [g, b, z] = args;
    if (is_nonpositive_integer(b)) {
        throw Error(ErrorKind::pole, "kummer_m: beta is a non-positive integer");
    }
    if (z == 0.0) {
        return {1.0};
    }
    if (is_nonpositive_integer(g)) {
        const SeriesResult s = kummer_series(g, b, z);
        return {s.sum, false, s.max_term >= kCancellationRatio * std::abs(s.sum)};
    }
    if (std::abs(z) > kKummerZMax) {
        return {kummer_m_asymptotic(g, b, z), true, false};
    }
    if (z < -kTransformThreshold) {
        // Kummer transformation M(g, b, z) = e^z M(b - g, b, -z).
        const SeriesResult s = kummer_series(b - g, b, -z);
        return {std::exp(z) * s.sum, false, s.max_term >= kCancellationRatio * std::abs(s.sum)};
    }
    const SeriesResult s = kummer_series(g, b, z);
    return {s.sum, false, s.max_term >= kCancellationRatio * std::abs(s.sum)};
}

double kummer_m(const KummerArgs& args) { return kummer_m_detailed(args).value; }

double kummer_m_derivative(const KummerArgs& args) {
    const auto [g, b, z] = args;
    if (g == 0.0) {
        return 0.0;
    }
    return g / b * kummer_m({g + 1.0, b + 1.0, z});
}

double log_tricomi_u(const KummerArgs& args) {
    const auto [g, b, z] = args;
    if (!(z > 0.0)) {
        throw Error(ErrorKind::domain, "log_tricomi_u: requires z > 0");
    }
    if (!(g > 0.0)) {
        throw Error(ErrorKind::domain, "log_tricomi_u: requires gamma > 0");
    }
    return log_tricomi_u_integral(g, b, z);
}

SpecialValue tricomi_u_detailed(const KummerArgs& args) {
    const auto [g, b, z] = args;
    if (!(z > 0.0)) {
        throw Error(ErrorKind::domain, "tricomi_u: requires z > 0");
    }
    if (g > 0.0) {
        const double value = std::exp(log_tricomi_u_integral(g, b, z));
        if (!std::isfinite(value)) {
            throw Error(ErrorKind::overflow, "tricomi_u: value exceeds double range");
        }
        return {value};
    }
    if (is_integer(b)) {
        throw Error(ErrorKind::domain, "tricomi_u: integer beta requires gamma > 0");
    }
    // U = Gamma(1-b)/Gamma(g-b+1) M(g,b,z) + Gamma(b-1)/Gamma(g) z^(1-b) M(g-b+1,2-b,z)
    const double first = gamma_fn(1.0 - b) * reciprocal_gamma(g - b + 1.0) * kummer_m({g, b, z});
    const double second =
        gamma_fn(b - 1.0) * reciprocal_gamma(g) * std::pow(z, 1.0 - b) * kummer_m({g - b + 1.0, 2.0 - b, z});
    const double value = first + second;
    const double largest = std::max(std::abs(first), std::abs(second));
    return {value, false, largest >= kCancellationRatio * std::abs(value)};
}

double tricomi_u(const KummerArgs& args) { return tricomi_u_detailed(args).value; }

double tricomi_u_derivative(const KummerArgs& args) {
    const auto [g, b, z] = args;
    if (g == 0.0) {
        return 0.0;
    }
    return -g * tricomi_u({g + 1.0, b + 1.0, z});
}

SpecialValue kummer_w_detailed(const KummerArgs& args) {
    const auto [g, b, z] = args;
    if (!(z < 0.0)) {
        throw Error(ErrorKind::domain, "kummer_w: requires z < 0");
    }
    if (is_integer(b)) {
        throw Error(ErrorKind::domain, "kummer_w: requires non-integer beta");
    }
    require_not_pole(1.0 - g, "kummer_w");
    const double a = b - g;
    if (a > 0.0) {
        // W(g,b,z) = e^z Gamma(b-g) Gamma(1-g) sin(pi b) / pi * U(b-g, b, -z)
        const double sign = gamma_sign(1.0 - g) * (sin_pi(b) > 0.0 ? 1.0 : -1.0);
        const double log_mag = z + log_gamma(a) + log_gamma(1.0 - g) + std::log(std::abs(sin_pi(b)) / kPi) +
                               log_tricomi_u_integral(a, b, -z);
        const double value = sign * std::exp(log_mag);
        if (!std::isfinite(value)) {
            throw Error(ErrorKind::overflow, "kummer_w: value exceeds double range");
        }
        return {value};
    }
    // W = Gamma(b-g)/Gamma(b) M(g,b,z) - Gamma(1-g)/Gamma(2-b) (-z)^(1-b) M(g-b+1,2-b,z)
    const double first = is_nonpositive_integer(a) ? 0.0 : gamma_ratio(a, b) * kummer_m({g, b, z});
    const double second =
        gamma_fn(1.0 - g) * reciprocal_gamma(2.0 - b) * std::pow(-z, 1.0 - b) * kummer_m({g - b + 1.0, 2.0 - b, z});
    const double value = first - second;
    const double largest = std::max(std::abs(first), std::abs(second));
    return {value, false, largest >= kCancellationRatio * std::abs(value)};
}

double kummer_w(const KummerArgs& args) { return kummer_w_detailed(args).value; }

double kummer_w_derivative(const KummerArgs& args) {
    const auto [g, b, z] = args;
    if (g == 0.0) {
        return 0.0;
    }
    return g * kummer_w({g + 1.0, b + 1.0, z});
}

} // namespace abstop
