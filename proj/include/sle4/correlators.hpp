#pragma once

// Cylinder amplitudes, boundary two-point functions and the heat-equation
// factor f(x, p) with its drift 4 f'/f.
//
// Every two-point function has the form |eta / theta1(x/2pi)|^{1/2} f(x, p)
// with d_p f = 2 d_x^2 f. For the uncompactified Dirichlet condition f is a
// single Gaussian centred at y = pi + sqrt(2) mu; for DN and SU(2) it is a
// Gaussian sum over the lattices {+-2 alpha + 4 pi n}, or equivalently a
// Fourier series in x/2.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <variant>

#include "sle4/boundary.hpp"
#include "sle4/error.hpp"
#include "sle4/special_functions.hpp"
#include "sle4/vector_field.hpp"
#include "sle4/vector_field.hpp"

namespace sle4 {

/// f and its x-derivative at one point.
struct FValue {
    double f = 0.0;
    double fx = 0.0;
};

/// The heat-equation factor of one boundary condition, with precomputed
/// parameters. Cheap to copy; evaluation is pure.
class HeatFactor {
public:
    enum class Kind { Gaussian, Lattice };

    static HeatFactor gaussian(double y) {
        detail::require_finite(y, "y");
        HeatFactor h;
        h.kind_ = Kind::Gaussian;
        h.y_ = y;
        return h;
    }

    static HeatFactor lattice(const SU2Params& s) {
        detail::require_finite(s.alpha, "alpha");
        HeatFactor h;
        h.kind_ = Kind::Lattice;
        h.alpha_ = s.alpha;
        h.wp_ = s.omega_plus;
        h.wm_ = s.omega_minus;
        h.offset_[0] = 2.0 * s.alpha;
        h.offset_[1] = -2.0 * s.alpha;
        h.weight_[0] = s.omega_plus;
        h.weight_[1] = s.omega_minus;
        for (int n = 0; n <= max_fourier_terms; ++n) {
            h.cos_n_[n] = std::cos(n * s.alpha);
            h.sin_n_[n] = (s.omega_plus - s.omega_minus) * std::sin(n * s.alpha);
        }
        return h;
    }

    static HeatFactor from(const BoundaryCondition& bc) {
        if (const auto* dd = std::get_if<DirichletUncompactified>(&bc)) return gaussian(dd->target());
        if (std::holds_alternative<DirichletNeumann>(bc)) return lattice(neumann_params());
        return lattice(std::get<SU2>(bc).params());
    }

    [[nodiscard]] Kind kind() const { return kind_; }

    /// f and f' with the representation chosen by p.
    [[nodiscard]] FValue eval(double x, double p) const {
        if (kind_ == Kind::Gaussian) return eval_gaussian(x, p);
        return (p >= special::representation_crossover) ? eval_fourier(x, p) : eval_images(x, p);
    }

    [[nodiscard]] double value(double x, double p) const { return eval(x, p).f; }
    [[nodiscard]] double dx(double x, double p) const { return eval(x, p).fx; }

    /// 4 f'/f. The lattice kind uses the log-scaled image sum below
    /// drift_crossover (finite where f underflows, and the cheaper form there)
    /// and the Fourier form above it.
    [[nodiscard]] double drift(double x, double p) const {
        if (kind_ == Kind::Gaussian) return (y_ - x) / p;
        if (p < drift_crossover) return drift_images(x, p);
        const FValue v = eval_fourier(x, p);
        return 4.0 * v.fx / v.f;
    }

    static constexpr double drift_crossover = 4.0;

    /// Fourier form 1/sqrt2 + sqrt2 sum e^{-n^2 p/2} (cos n alpha cos(nx/2) +
    /// (w+ - w-) sin n alpha sin(nx/2)). Lattice kind only.
    [[nodiscard]] FValue eval_fourier(double x, double p) const {
        require_lattice();
        detail::require_modulus(p);
        const int terms = fourier_terms(p);
        if (terms > max_fourier_terms) return eval_fourier_direct(x, p, terms);
        const double c1 = std::cos(0.5 * x);
        const double s1 = std::sin(0.5 * x);
        const double q = std::exp(-0.5 * p);
        const double q2 = q * q;
        double weight = q;      // q^{n^2}
        double ratio = q * q2;  // q^{2n+1}
        double cn = c1, sn = s1;
        double fsum = 0.0, dsum = 0.0;
        for (int n = 1; n <= terms; ++n) {
            const double a = cos_n_[n];
            const double b = sin_n_[n];
            fsum += weight * (a * cn + b * sn);
            dsum += weight * (0.5 * n) * (b * cn - a * sn);
            weight *= ratio;
            ratio *= q2;
            const double cn1 = cn * c1 - sn * s1;
            sn = sn * c1 + cn * s1;
            cn = cn1;
        }
        return {0.5 * std::numbers::sqrt2 + std::numbers::sqrt2 * fsum, std::numbers::sqrt2 * dsum};
    }

    /// Gaussian-image form sqrt(pi/p) sum (w+ G(x - 2a - 4 pi n) + w- G(x + 2a - 4 pi n)),
    /// G(u) = exp(-u^2 / 8p). Lattice kind only.
    [[nodiscard]] FValue eval_images(double x, double p) const {
        require_lattice();
        const Sums s = image_sums(x, p);
        const double scale = std::sqrt(special::pi / p) * std::exp(s.log_scale);
        return {scale * s.s0, -scale * s.s1 / (4.0 * p)};
    }

    [[nodiscard]] double drift_images(double x, double p) const {
        require_lattice();
        const Sums s = image_sums(x, p);
        return -s.s1 / (p * s.s0);
    }

    /// Image-form drift with terms below e^{log_cutoff} of the largest dropped
    /// (relative drift error below about that bound). For hot loops.
    [[nodiscard]] double drift_images_truncated(double x, double p, double log_cutoff) const {
        const Sums s = image_sums(x, p, log_cutoff);
        return -s.s1 / (p * s.s0);
    }

    /// Coefficients of the Fourier form at modulus p:
    /// f = 1/sqrt2 + sum_{n=1}^{N} (a_n cos(nx/2) + b_n sin(nx/2)).
    /// Returns N; a and b must hold max_fourier_terms + 1 entries (index 0 unused).
    int fourier_coefficients(double p, double* a, double* b) const {
        require_lattice();
        detail::require_modulus(p);
        const int terms = fourier_terms(p);
        if (terms > max_fourier_terms) throw DomainError("modulus too small for the Fourier form");
        for (int n = 1; n <= terms; ++n) {
            const double w = std::numbers::sqrt2 * std::exp(-0.5 * n * n * p);
            a[n] = w * cos_n_[n];
            b[n] = w * sin_n_[n];
        }
        return terms;
    }

    static int fourier_terms(double p) { return static_cast<int>(std::ceil(std::sqrt(84.0 / p))) + 1; }

    static constexpr int max_fourier_terms = 63;

    [[nodiscard]] double y() const { return y_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double omega_plus() const { return wp_; }
    [[nodiscard]] double omega_minus() const { return wm_; }

private:
    struct Sums {
        double log_scale;  // common factor exp(log_scale) taken out
        double s0;         // sum w G
        double s1;         // sum w (x - c) G
    };

    HeatFactor() = default;

    void require_lattice() const {
        if (kind_ != Kind::Lattice) throw DomainError("lattice representation requested for a Gaussian heat factor");
    }

    [[nodiscard]] FValue eval_gaussian(double x, double p) const {
        detail::require_modulus(p);
        const double d = x - y_;
        const double f = std::sqrt(special::pi / p) * std::exp(-d * d / (8.0 * p));
        return {f, -d / (4.0 * p) * f};
    }

    [[nodiscard]] Sums image_sums(double x, double p, double cutoff = -42.0) const {
        detail::require_modulus(p);
        constexpr double period = 4.0 * std::numbers::pi;
        double near[2];
        double dmin2 = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 2; ++k) {
            const double u = x - offset_[k];
            near[k] = u - period * std::nearbyint(u / period);
            if (weight_[k] != 0.0) dmin2 = std::min(dmin2, near[k] * near[k]);
        }
        const double inv8p = 1.0 / (8.0 * p);
        Sums out{-dmin2 * inv8p, 0.0, 0.0};
        for (int k = 0; k < 2; ++k) {
            if (weight_[k] == 0.0) continue;
            // Exponents decrease monotonically walking away from the nearest centre.
            for (int dir = 0; dir < 2; ++dir) {
                for (int j = dir; ; ++j) {
                    const double d = (dir == 0) ? near[k] - period * j : near[k] + period * j;
                    const double e = (dmin2 - d * d) * inv8p;
                    if (e < cutoff) break;
                    const double g = weight_[k] * std::exp(e);
                    out.s0 += g;
                    out.s1 += d * g;
                }
            }
        }
        return out;
    }

    [[nodiscard]] FValue eval_fourier_direct(double x, double p, int terms) const {
        const double dw = wp_ - wm_;
        double fsum = 0.0, dsum = 0.0;
        for (int n = 1; n <= terms; ++n) {
            const double w = std::exp(-0.5 * n * n * p);
            const double a = std::cos(n * alpha_);
            const double b = dw * std::sin(n * alpha_);
            fsum += w * (a * std::cos(0.5 * n * x) + b * std::sin(0.5 * n * x));
            dsum += w * (0.5 * n) * (b * std::cos(0.5 * n * x) - a * std::sin(0.5 * n * x));
        }
        return {0.5 * std::numbers::sqrt2 + std::numbers::sqrt2 * fsum, std::numbers::sqrt2 * dsum};
    }

    Kind kind_ = Kind::Gaussian;
    double y_ = 0.0;
    double alpha_ = 0.0;
    double wp_ = 0.5;
    double wm_ = 0.5;
    double offset_[2] = {0.0, 0.0};
    double weight_[2] = {0.5, 0.5};
    std::array<double, max_fourier_terms + 1> cos_n_{};  // cos(n alpha)
    std::array<double, max_fourier_terms + 1> sin_n_{};  // (w+ - w-) sin(n alpha)
};

// ---------------------------------------------------------------------------
// Amplitudes

/// Uncompactified Dirichlet cylinder amplitude eta^-1 sqrt(pi/p) exp(-(pi + sqrt2 mu)^2 / 8p).
inline double dd_amplitude(double mu, double p) {
    detail::require_finite(mu, "mu");
    detail::require_modulus(p);
    const double y = DirichletUncompactified{mu}.target();
    return std::sqrt(special::pi / p) * std::exp(-y * y / (8.0 * p)) / special::dedekind_eta(p);
}

/// Dirichlet-Neumann amplitude theta4(0 | 2ip/pi) / (sqrt2 eta).
inline double dn_amplitude(double p) {
    detail::require_modulus(p);
    return special::theta4(0.0, p) / (std::numbers::sqrt2 * special::dedekind_eta(p));
}

/// SU(2) amplitude (sqrt2 eta)^-1 sum_n e^{-n^2 p/2} cos(n alpha).
inline double su2_amplitude(double alpha, double p) {
    detail::require_finite(alpha, "alpha");
    detail::require_modulus(p);
    double sum = 0.0;
    for (int n = 1; n < 100000; ++n) {
        const double w = std::exp(-0.5 * n * n * p);
        sum += w * std::cos(n * alpha);
        if (w < 1e-18) break;
    }
    return (1.0 + 2.0 * sum) / (std::numbers::sqrt2 * special::dedekind_eta(p));
}

/// J^3 one-point function times the amplitude,
/// Re a / (2 sqrt2 eta sin alpha) sum_{n in Z} n e^{-n^2 p/2} sin(n alpha).
/// Zero when sin alpha = 0.
inline double j3_one_point(complex a, double p) {
    detail::require_modulus(p);
    const SU2Params s = su2_params(a);
    const double sin_alpha = std::sqrt(std::max(0.0, 1.0 - a.imag() * a.imag()));
    if (sin_alpha <= 1e-15) return 0.0;
    double sum = 0.0;
    for (int n = 1; n < 100000; ++n) {
        const double w = std::exp(-0.5 * n * n * p);
        sum += n * w * std::sin(n * s.alpha);
        if (w * n < 1e-18) break;
    }
    return a.real() / (2.0 * std::numbers::sqrt2 * special::dedekind_eta(p) * sin_alpha) * 2.0 * sum;
}

// ---------------------------------------------------------------------------
// f, two-point function, drift

inline double f_factor(const BoundaryCondition& bc, double x, double p) {
    detail::require_finite(x, "x");
    detail::require_modulus(p);
    return HeatFactor::from(bc).value(x, p);
}

inline double f_dx(const BoundaryCondition& bc, double x, double p) {
    detail::require_finite(x, "x");
    detail::require_modulus(p);
    return HeatFactor::from(bc).dx(x, p);
}

inline double drift(const BoundaryCondition& bc, double x, double p) {
    detail::require_finite(x, "x");
    detail::require_modulus(p);
    return HeatFactor::from(bc).drift(x, p);
}

namespace detail {
inline void require_open_interval(double x) {
    require_finite(x, "x");
    if (!(x > 0.0 && x < special::two_pi)) throw DomainError("x must lie in (0, 2 pi), got " + std::to_string(x));
}
}  // namespace detail

/// A <psi_- psi_+> = |eta / theta1(x/2pi | ip/pi)|^{1/2} f(x, p).
inline double two_point(const BoundaryCondition& bc, double x, double p) {
    detail::require_open_interval(x);
    detail::require_modulus(p);
    const double ratio = special::dedekind_eta(p) / special::theta1(x / special::two_pi, p);
    return std::sqrt(std::fabs(ratio)) * f_factor(bc, x, p);
}

/// Relative residual of the level-two null-vector equation
/// (2 d_x^2 + v d_x + v'/4) G = d_p G for G = f / |theta1|^{1/2}, using
/// central differences with steps 1e-4 in x and p.
inline double null_vector_residual(const BoundaryCondition& bc, double x, double p) {
    detail::require_open_interval(x);
    detail::require_modulus(p);
    const HeatFactor h = HeatFactor::from(bc);
    auto G = [&](double xx, double pp) {
        return h.value(xx, pp) / std::sqrt(std::fabs(special::theta1(xx / special::two_pi, pp)));
    };
    constexpr double hx = 1e-4;
    constexpr double hp = 1e-4;
    const double g0 = G(x, p);
    const double gxx = (G(x + hx, p) - 2.0 * g0 + G(x - hx, p)) / (hx * hx);
    const double gx = (G(x + hx, p) - G(x - hx, p)) / (2.0 * hx);
    const double gp = (G(x, p + hp) - G(x, p - hp)) / (2.0 * hp);
    const double v = v_field(x, p);
    const double vy = v_field_dy(x, p);
    const double lhs_terms[3] = {2.0 * gxx, v * gx, 0.25 * vy * g0};
    const double residual = lhs_terms[0] + lhs_terms[1] + lhs_terms[2] - gp;
    const double scale = std::fabs(lhs_terms[0]) + std::fabs(lhs_terms[1]) + std::fabs(lhs_terms[2]) + std::fabs(gp);
    return std::fabs(residual) / scale;
}

}  // namespace sle4
