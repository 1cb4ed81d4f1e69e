#pragma once

#include <string_view>

namespace abstop {

/// Classification of the bridge scaling parameter.
enum class Regime { zero, low, critical, high };

[[nodiscard]] constexpr std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
    case Regime::zero: return "zero";
    case Regime::low: return "low";
    case Regime::critical: return "critical";
    case Regime::high: return "high";
    }
    return "unknown";
}

/// Free-boundary constants for one alpha: stopping boundary B sqrt(1 - t),
/// normalization C of the continuation-region solution, and V = V(0, 0).
struct StoppingSolution {
    double alpha = 0.0;
    double B = 0.0;
    double C = 0.0;
    double V = 0.0;
    Regime regime = Regime::critical;
};

} // namespace abstop
