#pragma once

// Loewner vector field on the cylinder of modulus p,
//   v(z, p) = cot(z/2) + 4 sum_{n>=1} sin(nz) / (e^{2np} - 1),
// equivalently v(z, p) = (1/pi) d/dw ln theta1(w | i p / pi) at w = z / 2 pi.

#include <cmath>
#include <complex>

#include "sle4/error.hpp"
#include "sle4/special_functions.hpp"

namespace sle4 {

namespace detail {

inline void require_regular_point(double y) {
    require_finite(y, "y");
    const double r = std::remainder(y, special::two_pi);
    if (r == 0.0) throw DomainError("vector field is singular at y in 2 pi Z");
}

inline int v_series_terms(double p) {
    // e^{-2np} / (1 - e^{-2p}) below 1e-18.
    return static_cast<int>(std::ceil((41.5 - std::log1p(-std::exp(-2.0 * p))) / (2.0 * p))) + 1;
}

}  // namespace detail

/// v from the defining sine series.
inline double v_field_series(double y, double p) {
    detail::require_regular_point(y);
    detail::require_modulus(p);
    const double s1 = std::sin(y);
    const double c1 = std::cos(y);
    double sn = s1;
    double cn = c1;
    double sum = 0.0;
    const int terms = detail::v_series_terms(p);
    for (int n = 1; n <= terms; ++n) {
        sum += sn / std::expm1(2.0 * n * p);
        const double next_s = sn * c1 + cn * s1;
        cn = cn * c1 - sn * s1;
        sn = next_s;
    }
    return 1.0 / std::tan(y / 2.0) + 4.0 * sum;
}

/// v from the theta1 log-derivative in its Gaussian-image form.
inline double v_field_theta(double y, double p) {
    detail::require_regular_point(y);
    detail::require_modulus(p);
    const double z = y / special::two_pi;
    return special::theta1_dz_images(z, p) / (special::pi * special::theta1_images(z, p));
}

inline double v_field(double y, double p) {
    return (p >= special::representation_crossover) ? v_field_series(y, p) : v_field_theta(y, p);
}

/// dv/dy from the differentiated sine series.
inline double v_field_dy_series(double y, double p) {
    detail::require_regular_point(y);
    detail::require_modulus(p);
    const double s1 = std::sin(y);
    const double c1 = std::cos(y);
    double sn = s1;
    double cn = c1;
    double sum = 0.0;
    const int terms = detail::v_series_terms(p) + 2;
    for (int n = 1; n <= terms; ++n) {
        sum += n * cn / std::expm1(2.0 * n * p);
        const double next_s = sn * c1 + cn * s1;
        cn = cn * c1 - sn * s1;
        sn = next_s;
    }
    const double sh = std::sin(y / 2.0);
    return -0.5 / (sh * sh) + 4.0 * sum;
}

/// dv/dy from the image form: with E_m = exp(-(y - c_m)^2 / 4p) and signs
/// s_m, theta1 ~ sum s_m E_m, so v = 2 (ln theta1)_y and v_y = 2 (T''/T - (T'/T)^2).
inline double v_field_dy_theta(double y, double p) {
    detail::require_regular_point(y);
    detail::require_modulus(p);
    // Reduce to (-pi, pi]; v is 2 pi periodic.
    const double x = std::remainder(y, special::two_pi);
    const double t0 = special::theta1_images(x / special::two_pi, p);  // up to sqrt(pi/p)
    double t1 = 0.0;
    double t2 = 0.0;
    for (int j = 0; j < 100000; ++j) {
        const double c = special::pi * (2 * j + 1);
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        // Pair centred at +c (sign -) and -c (sign +) relative to theta1 = sum over j.
        const double dm = x - c;
        const double dp = x + c;
        const double em = std::exp(-dm * dm / (4.0 * p));
        const double ep = std::exp(-dp * dp / (4.0 * p));
        // theta1 pair: em - ep (times sign); derivatives of exp(-d^2/4p).
        t1 += sign * (-(dm / (2.0 * p)) * em + (dp / (2.0 * p)) * ep);
        t2 += sign * ((dm * dm / (4.0 * p * p) - 1.0 / (2.0 * p)) * em -
                      (dp * dp / (4.0 * p * p) - 1.0 / (2.0 * p)) * ep);
        if (em < 1e-300 || (j > 2 && em * (1.0 + dm * dm) < 1e-18 * (std::fabs(t2) + std::fabs(t1)))) break;
    }
    const double theta = t0 / std::sqrt(special::pi / p);
    const double r1 = t1 / theta;
    return 2.0 * (t2 / theta - r1 * r1);
}

inline double v_field_dy(double y, double p) {
    return (p >= special::representation_crossover) ? v_field_dy_series(y, p) : v_field_dy_theta(y, p);
}

/// v at a complex point of the cylinder, |Im z| < p. Uses the sine series for
/// p >= pi/2 and the Gaussian-image log-derivative otherwise.
inline std::complex<double> v_field(std::complex<double> z, double p) {
    using cd = std::complex<double>;
    detail::require_modulus(p);
    const double re = std::remainder(z.real(), special::two_pi);
    const cd w(re, z.imag());
    if (std::abs(w) == 0.0) throw DomainError("vector field is singular at z in 2 pi Z");
    if (p >= special::representation_crossover) {
        cd sum = 0.0;
        const double decay = 2.0 * p - std::fabs(w.imag());
        const int terms = static_cast<int>(std::ceil(42.0 / std::max(decay, 1e-3))) + 1;
        for (int n = 1; n <= terms; ++n) sum += std::sin(static_cast<double>(n) * w) / std::expm1(2.0 * n * p);
        return 1.0 / std::tan(w / 2.0) + 4.0 * sum;
    }
    cd num = 0.0;
    cd den = 0.0;
    const double reach = std::sqrt(4.0 * p * 45.0 + w.imag() * w.imag());
    for (int j = 0;; ++j) {
        const double c = special::pi * (2 * j + 1);
        if (c - special::pi > reach) break;
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        const cd dm = w - c;
        const cd dp = w + c;
        const cd em = std::exp(-dm * dm / (4.0 * p));
        const cd ep = std::exp(-dp * dp / (4.0 * p));
        den += sign * (em - ep);
        num += sign * (-dm * em + dp * ep) / (2.0 * p);
    }
    return 2.0 * num / den;
}

/// dv/dz at a complex point, term-wise from the same representations.
inline std::complex<double> v_field_dz(std::complex<double> z, double p) {
    using cd = std::complex<double>;
    detail::require_modulus(p);
    const double re = std::remainder(z.real(), special::two_pi);
    const cd w(re, z.imag());
    if (std::abs(w) == 0.0) throw DomainError("vector field is singular at z in 2 pi Z");
    if (p >= special::representation_crossover) {
        cd sum = 0.0;
        const double decay = 2.0 * p - std::fabs(w.imag());
        const int terms = static_cast<int>(std::ceil(44.0 / std::max(decay, 1e-3))) + 1;
        for (int n = 1; n <= terms; ++n) {
            sum += static_cast<double>(n) * std::cos(static_cast<double>(n) * w) / std::expm1(2.0 * n * p);
        }
        const cd sh = std::sin(w / 2.0);
        return -0.5 / (sh * sh) + 4.0 * sum;
    }
    cd t0 = 0.0;
    cd t1 = 0.0;
    cd t2 = 0.0;
    const double reach = std::sqrt(4.0 * p * 45.0 + w.imag() * w.imag());
    for (int j = 0;; ++j) {
        const double c = special::pi * (2 * j + 1);
        if (c - special::pi > reach) break;
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        const cd dm = w - c;
        const cd dp = w + c;
        const cd em = std::exp(-dm * dm / (4.0 * p));
        const cd ep = std::exp(-dp * dp / (4.0 * p));
        t0 += sign * (em - ep);
        t1 += sign * (-dm * em + dp * ep) / (2.0 * p);
        t2 += sign * ((dm * dm / (4.0 * p * p) - 1.0 / (2.0 * p)) * em -
                      (dp * dp / (4.0 * p * p) - 1.0 / (2.0 * p)) * ep);
    }
    const cd r1 = t1 / t0;
    return 2.0 * (t2 / t0 - r1 * r1);
}

}  // namespace sle4
