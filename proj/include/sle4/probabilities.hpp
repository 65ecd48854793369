#pragma once

// Passage and hitting probabilities of chordal SLE4 on the cylinder.
// alpha: the trace passes to the right (Y exits at 0); beta: to the left
// (Y exits at 2 pi); gamma: the trace reaches the upper boundary (tau = p).

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "sle4/boundary.hpp"
#include "sle4/error.hpp"
#include "sle4/special_functions.hpp"

namespace sle4 {

struct ProbabilityTriple {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    [[nodiscard]] double sum() const { return alpha + beta + gamma; }
};

namespace detail {

inline constexpr double probability_slack = 1e-9;

/// Clamps components into [0, 1]; a component further than 1e-9 outside is a
/// numerical failure, not rounding.
inline ProbabilityTriple finalize(ProbabilityTriple t, const char* where) {
    for (double* c : {&t.alpha, &t.beta, &t.gamma}) {
        if (!std::isfinite(*c) || *c < -probability_slack || *c > 1.0 + probability_slack) {
            throw NumericError(std::string(where) + ": probability out of range (" + std::to_string(*c) + ")");
        }
        *c = std::clamp(*c, 0.0, 1.0);
    }
    return t;
}

/// Largest |n| needed so that exp(-(4 pi n - r)^2 / 8p) with |r| <= reach is
/// below 1e-16 of the leading term; never less than 8.
inline long image_cutoff(double p, double reach) {
    const double width = std::sqrt(8.0 * p * 37.0);
    return std::max(8L, static_cast<long>(std::ceil((reach + width) / (4.0 * std::numbers::pi))) + 1);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Simply connected domain

/// Left-passage probability of chordal SLE_kappa in a simply connected domain,
/// 1/2 + Gamma(4/k) / (sqrt(pi) Gamma((8-k)/2k)) cot(x/2) 2F1(1/2, 4/k; 3/2; -cot^2(x/2)).
/// At kappa = 4 this is 1 - x/2pi; the cylinder exit problem in the p -> infinity
/// limit gives x/2pi, the same curve with the two sides exchanged.
inline double schramm_beta(double x, double kappa) {
    detail::require_finite(x, "x");
    detail::require_finite(kappa, "kappa");
    if (!(kappa > 0.0 && kappa < 8.0)) throw DomainError("kappa must lie in (0, 8)");
    if (!(x > 0.0 && x < special::two_pi)) throw DomainError("x must lie in (0, 2 pi)");
    const double c = std::tgamma(4.0 / kappa) /
                     (std::sqrt(special::pi) * std::tgamma((8.0 - kappa) / (2.0 * kappa)));
    const double ct = 1.0 / std::tan(0.5 * x);
    if (ct == 0.0) return 0.5;
    return 0.5 + c * ct * special::hyp2f1(0.5, 4.0 / kappa, 1.5, -ct * ct);
}

// ---------------------------------------------------------------------------
// Dirichlet-Dirichlet (uncompactified): Brownian bridge from x to y = pi + sqrt2 mu

/// Probabilities for the bridge on [0, 2 pi] ending at y after time p. Image
/// sums over 4 pi n, each term divided by the unconditioned density at y.
inline ProbabilityTriple dd_probabilities(double x, double p, double mu) {
    detail::require_finite(x, "x");
    detail::require_finite(mu, "mu");
    detail::require_modulus(p);
    if (!(x > 0.0 && x < special::two_pi)) throw DomainError("x must lie in (0, 2 pi), got " + std::to_string(x));
    const double y = DirichletUncompactified{mu}.target();
    const double four_pi = 4.0 * std::numbers::pi;
    const double base = (x - y) * (x - y);
    const double inv8p = 1.0 / (8.0 * p);
    // G(u) / G(x - y)
    auto ratio = [&](double u) { return std::exp((base - u * u) * inv8p); };
    const long cutoff = detail::image_cutoff(p, std::fabs(x) + std::fabs(y));

    // R(n0) = sum_{n >= n0} [G(x - y - 4 pi n) - G(x + y + 4 pi n)]
    // L(n0) = sum_{n >= n0} [G(x + y - 4 pi n) - G(x - y + 4 pi n)]
    auto right_tail = [&](long n0) {
        double s = 0.0;
        for (long n = n0; n <= cutoff; ++n) s += ratio(x - y - four_pi * n) - ratio(x + y + four_pi * n);
        return s;
    };
    auto left_tail = [&](long n0) {
        double s = 0.0;
        for (long n = n0; n <= cutoff; ++n) s += ratio(x + y - four_pi * n) - ratio(x - y + four_pi * n);
        return s;
    };

    ProbabilityTriple t;
    if (y <= 0.0) {
        t.beta = left_tail(1);
        t.alpha = 1.0 - t.beta;
        t.gamma = 0.0;
    } else if (y >= special::two_pi) {
        t.beta = right_tail(0);
        t.alpha = 1.0 - t.beta;
        t.gamma = 0.0;
    } else {
        t.alpha = 1.0 - right_tail(0);
        t.beta = left_tail(1);
        double g = 0.0;
        for (long n = -cutoff; n <= cutoff; ++n) g += ratio(x - y - four_pi * n) - ratio(x + y + four_pi * n);
        t.gamma = g;
    }
    return detail::finalize(t, "dd_probabilities");
}

// ---------------------------------------------------------------------------
// SU(2) family (DN is the a = 0 member)

namespace detail {

/// Image sums of the lattice-conditioned process at (x, p), all scaled by a
/// common factor: D = sum (w+ G+ + w- G-), Gp = sum G+, Gm = sum G-,
/// Np = sum n G+, Nm = sum n G-, with G+(n) = G(x - 2a - 4 pi n) and
/// G-(n) = G(x + 2a - 4 pi n).
struct LatticeSums {
    double d = 0.0;
    double gp = 0.0;
    double gm = 0.0;
    double np = 0.0;
    double nm = 0.0;
};

inline LatticeSums lattice_sums(double x, double p, double alpha, double wp, double wm) {
    const double four_pi = 4.0 * std::numbers::pi;
    const double inv8p = 1.0 / (8.0 * p);
    // Common scale: nearest centre of either lattice.
    double dmin2 = std::numeric_limits<double>::infinity();
    for (double off : {2.0 * alpha, -2.0 * alpha}) {
        const double u = x - off;
        const double d = u - four_pi * std::nearbyint(u / four_pi);
        dmin2 = std::min(dmin2, d * d);
    }
    const long cutoff = image_cutoff(p, std::fabs(x) + 2.0 * std::fabs(alpha));
    LatticeSums s;
    for (long n = -cutoff; n <= cutoff; ++n) {
        const double up = x - 2.0 * alpha - four_pi * n;
        const double um = x + 2.0 * alpha - four_pi * n;
        const double gp = std::exp((dmin2 - up * up) * inv8p);
        const double gm = std::exp((dmin2 - um * um) * inv8p);
        s.gp += gp;
        s.gm += gm;
        s.np += n * gp;
        s.nm += n * gm;
        s.d += wp * gp + wm * gm;
    }
    return s;
}

inline void require_x_in_interval(double x, const char* where) {
    require_finite(x, "x");
    if (!(x > 0.0 && x < special::two_pi)) {
        throw DomainError(std::string(where) + ": x must lie in (0, 2 pi), got " + std::to_string(x));
    }
}

}  // namespace detail

/// Probabilities for SU(2) parameters written on either branch.
/// Lower branch (alpha in [0, pi]):
///   gamma = w+ sum (G+ - G-) / D,  beta = sum n (G+ + G-) / D.
/// Upper branch (alpha in [pi, 2 pi]):
///   gamma = w- sum (G- - G+) / D,  beta = [sum n (G+ + G-) + sum (G+ - G-)] / D.
/// alpha follows from the sum rule.
inline ProbabilityTriple su2_probabilities(double x, double p, const SU2Params& s) {
    detail::require_x_in_interval(x, "su2_probabilities");
    detail::require_modulus(p);
    const detail::LatticeSums l = detail::lattice_sums(x, p, s.alpha, s.omega_plus, s.omega_minus);
    ProbabilityTriple t;
    if (s.branch == Branch::Lower) {
        t.gamma = s.omega_plus * (l.gp - l.gm) / l.d;
        t.beta = (l.np + l.nm) / l.d;
    } else {
        t.gamma = s.omega_minus * (l.gm - l.gp) / l.d;
        t.beta = (l.np + l.nm + l.gp - l.gm) / l.d;
    }
    t.alpha = 1.0 - t.beta - t.gamma;
    return detail::finalize(t, "su2_probabilities");
}

/// Probabilities for the SU(2) condition with diagonal entry a, written on the
/// requested branch.
inline ProbabilityTriple su2_probabilities(double x, double p, complex a, Branch branch = Branch::Lower) {
    SU2Params s = su2_params(a);
    if (branch == Branch::Upper) s = to_other_branch(s);
    return su2_probabilities(x, p, s);
}

/// Dirichlet-Neumann probabilities via the lattice kernel at alpha = pi/2,
/// w+ = w- = 1/2.
inline ProbabilityTriple dn_probabilities(double x, double p) {
    return su2_probabilities(x, p, neumann_params());
}

/// Dirichlet-Neumann probabilities from theta quotients:
/// gamma = u1 = theta1(x/2pi | 2ip/pi) / theta4(x/2pi | 2ip/pi),
/// beta = u2 - u1/2 with u2 = (1/2pi)(2p theta4'/(pi theta4) + x).
inline ProbabilityTriple dn_probabilities_theta(double x, double p) {
    detail::require_x_in_interval(x, "dn_probabilities_theta");
    detail::require_modulus(p);
    const double z = x / special::two_pi;
    const double t4 = special::theta4(z, p);
    const double u1 = special::theta1(z, 2.0 * p) / t4;
    const double u2 = (2.0 * p * special::theta4_dz(z, p) / (special::pi * t4) + x) / special::two_pi;
    ProbabilityTriple t;
    t.gamma = u1;
    t.beta = u2 - 0.5 * u1;
    t.alpha = 1.0 - t.beta - t.gamma;
    return detail::finalize(t, "dn_probabilities_theta");
}

/// The uncorrected explicit DN left-passage series,
/// sum n (G+ + G-) / sum (G+ + G-) at alpha = pi/2. It is half of
/// the value obtained from u2 - u1/2 and is kept only for arbitration against
/// the Monte Carlo and dynamic-programming oracles.
inline double dn_beta_printed_series(double x, double p) {
    detail::require_x_in_interval(x, "dn_beta_printed_series");
    detail::require_modulus(p);
    const detail::LatticeSums l = detail::lattice_sums(x, p, special::pi / 2.0, 0.5, 0.5);
    return (l.np + l.nm) / (l.gp + l.gm);
}

/// Closed-form probabilities for any boundary condition.
inline ProbabilityTriple probabilities(const BoundaryCondition& bc, double x, double p) {
    if (const auto* dd = std::get_if<DirichletUncompactified>(&bc)) return dd_probabilities(x, p, dd->mu);
    if (std::holds_alternative<DirichletNeumann>(bc)) return dn_probabilities(x, p);
    return su2_probabilities(x, p, std::get<SU2>(bc).params());
}

struct CurvePoint {
    double x;
    ProbabilityTriple probs;
};

/// Evaluates the probabilities on a grid, in grid order. Errors carry the
/// offending x.
inline std::vector<CurvePoint> probability_curve(const BoundaryCondition& bc, double p, const std::vector<double>& grid) {
    std::vector<CurvePoint> out;
    out.reserve(grid.size());
    for (double x : grid) {
        try {
            out.push_back({x, probabilities(bc, x, p)});
        } catch (const DomainError& e) {
            throw DomainError("at x = " + std::to_string(x) + ": " + e.what());
        } catch (const NumericError& e) {
            throw NumericError("at x = " + std::to_string(x) + ": " + e.what());
        }
    }
    return out;
}

/// Uniform interior grid x_i = 2 pi i / (n + 1), i = 1..n.
inline std::vector<double> uniform_grid(std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = special::two_pi * static_cast<double>(i + 1) / static_cast<double>(n + 1);
    return g;
}

}  // namespace sle4
