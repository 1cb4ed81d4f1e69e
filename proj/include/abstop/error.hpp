#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace abstop {

enum class ErrorKind {
    pole,            // Gamma pole or non-positive integer series denominator
    overflow,        // result exceeds the representable range
    domain,          // argument outside the function's domain
    non_convergence, // series or iteration hit its cap
    singularity,     // quantity undefined at this parameter (alpha = 1/2)
    bracket_failure, // no sign change found for a root
    consistency,     // two routes to the same quantity disagree
    not_found,       // search found nothing (e.g. no interior extremum)
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::pole: return "pole";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::domain: return "domain";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::bracket_failure: return "bracket-failure";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::not_found: return "not-found";
    }
    return "unknown";
}

} // namespace abstop
