#pragma once

// Upper-boundary conditions of the cylinder and the SU(2) parametrization.
// The lower boundary always carries the +-lambda jump pair, lambda = pi/sqrt(2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <variant>

#include "sle4/error.hpp"

namespace sle4 {

using complex = std::complex<double>;

/// Jump of the free field across a boundary-condition change, lambda = pi/sqrt(2).
inline constexpr double lambda = std::numbers::pi / std::numbers::sqrt2;

/// Field pinned to the value mu on the upper boundary (uncompactified boson).
struct DirichletUncompactified {
    double mu = 0.0;

    /// Bridge target y = pi + sqrt(2) mu.
    [[nodiscard]] double target() const { return std::numbers::pi + std::numbers::sqrt2 * mu; }
};

/// Neumann condition on the upper boundary.
struct DirichletNeumann {};

/// Which of the two equivalent angle branches a parameter set is written in.
enum class Branch { Lower, Upper };

/// Image-lattice data of an SU(2) boundary condition. The lattices are
/// L+ = {2 alpha + 4 pi n} with weight omega_plus and L- = {-2 alpha + 4 pi n}
/// with weight omega_minus.
struct SU2Params {
    double alpha = std::numbers::pi / 2.0;
    double omega_plus = 0.5;
    double omega_minus = 0.5;
    Branch branch = Branch::Lower;
};

/// Lattice parameters from the diagonal entry a of the SU(2) matrix.
/// alpha = arccos(-Im a) in [0, pi]; omega_minus = 1 - omega_plus.
inline SU2Params su2_params(complex a) {
    detail::require_finite(a.real(), "Re a");
    detail::require_finite(a.imag(), "Im a");
    if (std::abs(a) > 1.0 + 1e-12) {
        throw DomainError("invalid SU(2) parameter: |a| = " + std::to_string(std::abs(a)) + " > 1");
    }
    const double im = std::clamp(a.imag(), -1.0, 1.0);
    SU2Params out;
    out.alpha = std::acos(-im);
    const double sin_alpha = std::sqrt(std::max(0.0, 1.0 - im * im));
    if (sin_alpha <= 1e-15) {
        out.omega_plus = 0.5;
    } else {
        // Numerators at rounding level are exact zeros: |Re a| = sin alpha on the unit circle.
        constexpr double eps = 8.0 * std::numeric_limits<double>::epsilon();
        const double num_plus = sin_alpha + a.real();
        const double num_minus = sin_alpha - a.real();
        if (num_plus <= eps) {
            out.omega_plus = 0.0;
        } else if (num_minus <= eps) {
            out.omega_plus = 1.0;
        } else {
            out.omega_plus = std::clamp(num_plus / (2.0 * sin_alpha), 0.0, 1.0);
        }
    }
    out.omega_minus = 1.0 - out.omega_plus;
    out.branch = Branch::Lower;
    return out;
}

/// Same boundary condition written on the other branch: alpha -> 2 pi - alpha
/// with the lattice weights exchanged.
inline SU2Params to_other_branch(const SU2Params& s) {
    SU2Params out;
    out.alpha = 2.0 * std::numbers::pi - s.alpha;
    out.omega_plus = s.omega_minus;
    out.omega_minus = s.omega_plus;
    out.branch = (s.branch == Branch::Lower) ? Branch::Upper : Branch::Lower;
    return out;
}

/// SU(2) boundary matrix ((a, b), (-conj b, conj a)) with |a|^2 + |b|^2 = 1.
class SU2 {
public:
    SU2(complex a, complex b) : a_(a), b_(b) {
        detail::require_finite(a.real(), "Re a");
        detail::require_finite(a.imag(), "Im a");
        detail::require_finite(b.real(), "Re b");
        detail::require_finite(b.imag(), "Im b");
        const double norm = std::norm(a) + std::norm(b);
        if (std::fabs(norm - 1.0) > 1e-12) {
            throw DomainError("invalid SU(2) parameter: |a|^2 + |b|^2 = " + std::to_string(norm));
        }
        params_ = su2_params(a);
    }

    /// Completes a with the real, non-negative b = sqrt(1 - |a|^2).
    static SU2 from_a(complex a) {
        const double n = std::norm(a);
        if (n > 1.0 + 1e-12) throw DomainError("invalid SU(2) parameter: |a| > 1");
        return SU2(a, complex(std::sqrt(std::max(0.0, 1.0 - n)), 0.0));
    }

    /// Normalizes an arbitrary non-zero pair (a, b) onto SU(2).
    static SU2 normalized(complex a, complex b) {
        const double n = std::sqrt(std::norm(a) + std::norm(b));
        if (!(n > 0.0)) throw DomainError("cannot normalize a zero SU(2) pair");
        a /= n;
        b /= n;
        // Absorb rounding so the norm check sees exactly the unit sphere.
        b = std::polar(std::sqrt(std::max(0.0, 1.0 - std::norm(a))), std::arg(b));
        return SU2(a, b);
    }

    [[nodiscard]] complex a() const { return a_; }
    [[nodiscard]] complex b() const { return b_; }
    [[nodiscard]] const SU2Params& params() const { return params_; }

private:
    complex a_;
    complex b_;
    SU2Params params_;
};

using BoundaryCondition = std::variant<DirichletUncompactified, DirichletNeumann, SU2>;

/// Lattice parameters describing the Neumann condition (a = 0).
inline SU2Params neumann_params() { return su2_params(complex(0.0, 0.0)); }

/// Short tag used by the CLI and diagnostics.
inline std::string bc_name(const BoundaryCondition& bc) {
    if (std::holds_alternative<DirichletUncompactified>(bc)) return "dd";
    if (std::holds_alternative<DirichletNeumann>(bc)) return "dn";
    return "su2";
}

}  // namespace sle4
