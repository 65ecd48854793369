#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace sle4 {

/// Raised when an argument lies outside the domain of a function
/// (non-positive modulus, point outside (0, 2π), invalid SU(2) matrix, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised when a computation produced a non-finite or out-of-range result.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be finite");
    }
}

inline void require_modulus(double p) {
    require_finite(p, "p");
    if (!(p > 0.0)) {
        throw DomainError("modulus p must be positive, got " + std::to_string(p));
    }
}

}  // namespace detail
}  // namespace sle4
