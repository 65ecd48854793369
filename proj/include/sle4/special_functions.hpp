#pragma once

// Jacobi theta functions and the Dedekind eta function for purely imaginary
// modular parameter, plus the Gauss hypergeometric function on the real line.
//
// Every theta function here takes the cylinder modulus p instead of a complex
// tau: theta1 is evaluated at tau = i p / pi (nome e^-p), theta4 at
// tau = 2 i p / pi (nome e^-2p). These are the only two parameters the
// cylinder correlators need.

#include <cmath>
#include <limits>
#include <numbers>

#include "sle4/error.hpp"

namespace sle4::special {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Modulus at which evaluation switches from the q-series (p >= crossover)
/// to the Gaussian-image (Poisson resummed) representation.
inline constexpr double representation_crossover = std::numbers::pi / 2.0;

/// Arguments of a theta function: first argument z and cylinder modulus p.
struct ThetaParams {
    double z = 0.0;
    double p = 1.0;

    void validate() const {
        detail::require_finite(z, "z");
        detail::require_modulus(p);
    }
    /// Nome of theta1, q = e^-p.
    [[nodiscard]] double nome() const { return std::exp(-p); }
};

namespace detail {

inline constexpr double series_rel_tol = 1e-16;
inline constexpr int series_max_terms = 100000;

/// Splits z = k + r with r in [-1/2, 1/2]; returns r and (-1)^k.
struct ReducedArg {
    double r;
    double sign;  // (-1)^k
};

inline ReducedArg reduce_unit_period(double z) {
    const double k = std::nearbyint(z);
    const double r = z - k;
    const double sign = (std::fmod(std::fabs(k), 2.0) == 1.0) ? -1.0 : 1.0;
    return {r, sign};
}

inline bool converged(double bound, double partial) {
    return bound <= series_rel_tol * std::fabs(partial) || bound < 1e-300;
}

inline void check_args(double z, double p) {
    sle4::detail::require_finite(z, "z");
    sle4::detail::require_modulus(p);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// theta1(z | i p / pi)

/// theta1 from its defining q-series, 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1) pi z).
inline double theta1_series(double z, double p) {
    detail::check_args(z, p);
    const auto [r, sign] = detail::reduce_unit_period(z);
    double sum = 0.0;
    for (int n = 0; n < detail::series_max_terms; ++n) {
        const double k = n + 0.5;
        const double bound = std::exp(-p * k * k);
        const double term = bound * std::sin((2 * n + 1) * pi * r);
        sum += (n % 2 == 0) ? term : -term;
        if (detail::converged(bound, sum)) break;
    }
    return sign * 2.0 * sum;
}

/// theta1 from the Gaussian-image form
/// sqrt(pi/p) sum_m (-1)^{m+1} exp(-(x + pi - 2 pi m)^2 / 4p), x = 2 pi z.
/// Image pairs are combined through expm1 so the zero at z = 0 is resolved
/// without cancellation.
inline double theta1_images(double z, double p) {
    detail::check_args(z, p);
    const auto [r, sign] = detail::reduce_unit_period(z);
    const double x = two_pi * std::fabs(r);
    const double odd = (r < 0.0) ? -1.0 : 1.0;
    double sum = 0.0;
    for (int j = 0; j < detail::series_max_terms; ++j) {
        const double c = pi * (2 * j + 1);
        const double d = x - c;
        const double bound = std::exp(-d * d / (4.0 * p));
        const double term = -bound * std::expm1(-x * c / p);
        sum += (j % 2 == 0) ? term : -term;
        if (detail::converged(bound, sum)) break;
    }
    return sign * odd * std::sqrt(pi / p) * sum;
}

/// theta1(z | i p / pi), representation chosen by p.
inline double theta1(double z, double p) {
    return (p >= representation_crossover) ? theta1_series(z, p) : theta1_images(z, p);
}

/// d theta1 / dz, term-wise from the q-series.
inline double theta1_dz_series(double z, double p) {
    detail::check_args(z, p);
    const auto [r, sign] = detail::reduce_unit_period(z);
    double sum = 0.0;
    for (int n = 0; n < detail::series_max_terms; ++n) {
        const double k = n + 0.5;
        const double bound = std::exp(-p * k * k) * (2 * n + 1) * pi;
        const double term = bound * std::cos((2 * n + 1) * pi * r);
        sum += (n % 2 == 0) ? term : -term;
        if (detail::converged(bound, sum)) break;
    }
    return sign * 2.0 * sum;
}

/// d theta1 / dz, term-wise from the Gaussian-image form.
inline double theta1_dz_images(double z, double p) {
    detail::check_args(z, p);
    const auto [r, sign] = detail::reduce_unit_period(z);
    const double x = two_pi * std::fabs(r);
    double sum = 0.0;
    for (int j = 0; j < detail::series_max_terms; ++j) {
        const double c = pi * (2 * j + 1);
        const double em = std::exp(-(x - c) * (x - c) / (4.0 * p));
        const double ep = std::exp(-(x + c) * (x + c) / (4.0 * p));
        const double term = (-(x - c) * em + (x + c) * ep) / (2.0 * p);
        sum += (j % 2 == 0) ? term : -term;
        if (detail::converged(em * (c + x) / p, sum)) break;
    }
    return sign * two_pi * std::sqrt(pi / p) * sum;
}

inline double theta1_dz(double z, double p) {
    return (p >= representation_crossover) ? theta1_dz_series(z, p) : theta1_dz_images(z, p);
}

// ---------------------------------------------------------------------------
// theta4(z | 2 i p / pi)

/// theta4 from its q-series, 1 + 2 sum (-1)^n e^{-2 p n^2} cos(2 pi n z).
inline double theta4_series(double z, double p) {
    detail::check_args(z, p);
    const auto [r, sign] = detail::reduce_unit_period(z);
    (void)sign;  // period 1
    double sum = 0.0;
    for (int n = 1; n < detail::series_max_terms; ++n) {
        const double bound = std::exp(-2.0 * p * n * n);
        const double term = bound * std::cos(two_pi * n * r);
        sum += (n % 2 == 0) ? term : -term;
        if (detail::converged(bound, 1.0 + 2.0 * sum)) break;
    }
    return 1.0 + 2.0 * sum;
}

/// theta4 from the Gaussian-image form
/// sqrt(pi/2p) sum_m exp(-(x - pi(2m+1))^2 / 8p), x = 2 pi z.
inline double theta4_images(double z, double p) {
    detail::check_args(z, p);
    const double x = two_pi * std::fabs(detail::reduce_unit_period(z).r);
    // x in [0, pi]: nearest centres are pi and -pi, then 3pi, -3pi, ...
    double sum = 0.0;
    for (int j = 0; j < detail::series_max_terms; ++j) {
        const double c = pi * (2 * j + 1);
        const double em = std::exp(-(x - c) * (x - c) / (8.0 * p));
        const double ep = std::exp(-(x + c) * (x + c) / (8.0 * p));
        sum += em + ep;
        if (detail::converged(em, sum)) break;
    }
    return std::sqrt(pi / (2.0 * p)) * sum;
}

inline double theta4(double z, double p) {
    return (p >= representation_crossover) ? theta4_series(z, p) : theta4_images(z, p);
}

inline double theta4_dz_series(double z, double p) {
    detail::check_args(z, p);
    const double r = detail::reduce_unit_period(z).r;
    double sum = 0.0;
    for (int n = 1; n < detail::series_max_terms; ++n) {
        const double bound = std::exp(-2.0 * p * n * n) * two_pi * n;
        const double term = -bound * std::sin(two_pi * n * r);
        sum += (n % 2 == 0) ? term : -term;
        if (detail::converged(bound, sum)) break;
    }
    return 2.0 * sum;
}

inline double theta4_dz_images(double z, double p) {
    detail::check_args(z, p);
    const double r = detail::reduce_unit_period(z).r;
    const double x = two_pi * std::fabs(r);
    const double odd = (r < 0.0) ? -1.0 : 1.0;
    double sum = 0.0;
    for (int j = 0; j < detail::series_max_terms; ++j) {
        const double c = pi * (2 * j + 1);
        const double em = std::exp(-(x - c) * (x - c) / (8.0 * p));
        const double ep = std::exp(-(x + c) * (x + c) / (8.0 * p));
        sum += (-(x - c) * em - (x + c) * ep) / (4.0 * p);
        if (detail::converged(em * (c + x) / p, sum)) break;
    }
    return odd * two_pi * std::sqrt(pi / (2.0 * p)) * sum;
}

inline double theta4_dz(double z, double p) {
    return (p >= representation_crossover) ? theta4_dz_series(z, p) : theta4_dz_images(z, p);
}

// ---------------------------------------------------------------------------
// Dedekind eta(i p / pi)

/// e^{-p/12} prod_{n>=1} (1 - e^{-2np}); factors are taken until they differ
/// from 1 by less than 1e-16.
inline double dedekind_eta_product(double p) {
    sle4::detail::require_modulus(p);
    double prod = 1.0;
    for (int n = 1; n < detail::series_max_terms; ++n) {
        const double q = std::exp(-2.0 * n * p);
        if (q < 1e-16) break;
        prod *= 1.0 - q;
    }
    return std::exp(-p / 12.0) * prod;
}

/// eta(i p / pi). For p < pi the product is taken at the S-transformed
/// argument, eta(i t) = t^{-1/2} eta(i / t), which needs far fewer factors.
inline double dedekind_eta(double p) {
    sle4::detail::require_modulus(p);
    if (p >= pi) return dedekind_eta_product(p);
    const double dual = pi * pi / p;
    return std::sqrt(pi / p) * dedekind_eta_product(dual);
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric 2F1(a, b; c; w) for real w < 1.

namespace detail {

inline bool is_nonpositive_integer(double v) {
    return v <= 0.0 && std::nearbyint(v) == v;
}

inline double reciprocal_gamma(double v) {
    return is_nonpositive_integer(v) ? 0.0 : 1.0 / std::tgamma(v);
}

/// Plain power series; |w| < 1 required.
inline double hyp2f1_series(double a, double b, double c, double w, int max_terms = 5000000) {
    double term = 1.0;
    double sum = 1.0;
    for (int n = 0; n < max_terms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * w;
        sum += term;
        if (term == 0.0) break;
        // Tail of a series whose term ratio tends to w.
        const double ratio = std::fabs(w);
        if (n > 4 && std::fabs(term) * ratio / (1.0 - ratio) <= 1e-17 * std::fabs(sum)) break;
    }
    return sum;
}

/// Series about w = 1 (connection formula); requires c - a - b not an integer.
inline double hyp2f1_near_one(double a, double b, double c, double w) {
    const double s = 1.0 - w;
    const double cab = c - a - b;
    const double first = std::tgamma(c) * std::tgamma(cab) * reciprocal_gamma(c - a) *
                         reciprocal_gamma(c - b);
    const double second = std::pow(s, cab) * std::tgamma(c) * std::tgamma(-cab) *
                          reciprocal_gamma(a) * reciprocal_gamma(b);
    double value = 0.0;
    if (first != 0.0) value += first * hyp2f1_series(a, b, 1.0 - cab, s);
    if (second != 0.0) value += second * hyp2f1_series(c - a, c - b, cab + 1.0, s);
    return value;
}

}  // namespace detail

/// 2F1(a, b; c; w) for real w < 1 and c not a non-positive integer.
/// |w| <= 1/2 uses the defining series; w < -1/2 goes through the Pfaff
/// transformation to w / (w - 1) in (1/3, 1); arguments close to 1 use the
/// connection formula about w = 1 unless c - a - b is (nearly) an integer.
inline double hyp2f1(double a, double b, double c, double w) {
    sle4::detail::require_finite(w, "w");
    if (!(w < 1.0)) throw DomainError("hyp2f1: argument must be < 1");
    if (detail::is_nonpositive_integer(c)) throw DomainError("hyp2f1: c is a non-positive integer");
    if (std::fabs(w) <= 0.5) return detail::hyp2f1_series(a, b, c, w);
    if (w < 0.0) {
        const double s = w / (w - 1.0);
        return std::pow(1.0 - w, -a) * hyp2f1(a, c - b, c, s);
    }
    const double cab = c - a - b;
    if (w > 0.9 && std::fabs(cab - std::nearbyint(cab)) > 1e-6) {
        return detail::hyp2f1_near_one(a, b, c, w);
    }
    return detail::hyp2f1_series(a, b, c, w);
}

}  // namespace sle4::special
