#pragma once

// Deterministic self-check suite: identities and invariants of every module
// evaluated on fixed grids. Used by the `check` command.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "sle4/boundary.hpp"
#include "sle4/correlators.hpp"
#include "sle4/probabilities.hpp"
#include "sle4/rng.hpp"
#include "sle4/sde.hpp"
#include "sle4/special_functions.hpp"
#include "sle4/vector_field.hpp"

namespace sle4::checks {

/// Deliberate formula perturbations for exercising the suite itself.
enum class Mutation {
    None,
    DnPrintedBeta,      // DN left passage from the printed explicit series
    DdRepellingDrift,   // bridge drift with the opposite sign
    Theta4PrintedNome,  // DN amplitude series with e^{-n^2 p} instead of e^{-2 n^2 p}
};

inline Mutation parse_mutation(const std::string& name) {
    if (name.empty() || name == "none") return Mutation::None;
    if (name == "dn-printed-beta") return Mutation::DnPrintedBeta;
    if (name == "dd-repelling-drift") return Mutation::DdRepellingDrift;
    if (name == "theta4-printed-nome") return Mutation::Theta4PrintedNome;
    throw DomainError("unknown mutation '" + name + "'");
}

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      // worst observed deviation
    double tolerance = 0.0;
};

namespace detail {

inline std::vector<BoundaryCondition> sample_conditions(std::uint64_t seed, int n_su2) {
    std::vector<BoundaryCondition> out{DirichletUncompactified{-2.0 * lambda}, DirichletUncompactified{0.0},
                                       DirichletUncompactified{0.5 * lambda}, DirichletUncompactified{2.0 * lambda},
                                       DirichletNeumann{}};
    rng::PhiloxEngine eng(seed, 0, rng::Stream::Normal);
    auto uni = [&] { return rng::to_open_unit(static_cast<std::uint32_t>(eng() >> 11)) * 2.0 - 1.0; };
    for (int i = 0; i < n_su2; ++i) out.emplace_back(SU2::normalized({uni(), uni()}, {uni(), uni()}));
    return out;
}

inline CheckResult make(std::string name, double worst, double tol) {
    return {std::move(name), std::isfinite(worst) && worst <= tol, worst, tol};
}

}  // namespace detail

/// Runs the suite; every entry carries the worst deviation found.
inline std::vector<CheckResult> run_checks(Mutation mutation = Mutation::None) {
    using special::pi;
    using special::two_pi;
    std::vector<CheckResult> out;

    // special_fn: dual representations and parity.
    {
        double worst = 0.0, parity = 0.0;
        for (double p : {0.1, 0.3, 0.7, 1.0, 2.0, 5.0, 10.0}) {
            for (int i = 0; i <= 20; ++i) {
                const double z = i / 20.0;
                worst = std::max({worst, std::fabs(special::theta1_series(z, p) - special::theta1_images(z, p)),
                                  std::fabs(special::theta4_series(z, p) - special::theta4_images(z, p))});
                parity = std::max({parity, std::fabs(special::theta1(-z, p) + special::theta1(z, p)),
                                   std::fabs(special::theta4(-z, p) - special::theta4(z, p))});
            }
        }
        out.push_back(detail::make("theta_dual_representation", worst, 1e-12));
        out.push_back(detail::make("theta_parity", parity, 1e-14));
    }
    {
        // theta1(x/2pi) ~ eta^3 x: fitted cubic coefficient stays bounded.
        double worst = 0.0;
        for (double p : {0.5, 1.0, pi, 5.0}) {
            const double e3 = std::pow(special::dedekind_eta(p), 3);
            for (double x : {0.1, 0.05, 0.02, 0.01}) {
                worst = std::max(worst, std::fabs(special::theta1(x / two_pi, p) - e3 * x) / (x * x * x));
            }
        }
        out.push_back(detail::make("theta1_small_x_slope", worst, 1.0));
    }
    {
        double amp = 0.0;
        for (double p : {0.5, 1.0, pi, 10.0}) {
            double printed = 1.0;
            const double rate = (mutation == Mutation::Theta4PrintedNome) ? 1.0 : 2.0;
            for (int n = 1; n < 60; ++n) printed += 2.0 * ((n % 2) ? -1.0 : 1.0) * std::exp(-rate * n * n * p);
            amp = std::max(amp, std::fabs(printed / (std::numbers::sqrt2 * special::dedekind_eta(p)) - dn_amplitude(p)) /
                                    dn_amplitude(p));
            amp = std::max(amp, std::fabs(su2_amplitude(pi / 2.0, p) - dn_amplitude(p)) / dn_amplitude(p));
        }
        out.push_back(detail::make("dn_amplitude_series", amp, 1e-14));
    }

    const auto conditions = detail::sample_conditions(2024, 6);

    // correlators: heat equation, null vector, positivity, drift forms.
    {
        double heat = 0.0, positive = 1.0, nv = 0.0, drift_forms = 0.0;
        for (const auto& bc : conditions) {
            const HeatFactor h = HeatFactor::from(bc);
            for (double p : {0.3, 0.8, 1.5, 3.0}) {
                for (int i = 1; i < 12; ++i) {
                    const double x = two_pi * i / 12.0;
                    constexpr double hh = 1e-4;
                    const double fp = (h.value(x, p + hh) - h.value(x, p - hh)) / (2 * hh);
                    const double fxx = (h.value(x + hh, p) - 2 * h.value(x, p) + h.value(x - hh, p)) / (hh * hh);
                    heat = std::max(heat, std::fabs(fp - 2 * fxx) / (std::fabs(fp) + std::fabs(fxx) + 1.0));
                    positive = std::min(positive, h.value(x, p) > 0.0 ? 1.0 : -1.0);
                    if (p >= 0.5) nv = std::max(nv, null_vector_residual(bc, x, p));
                    double analytic = 4.0 * h.dx(x, p) / h.value(x, p);
                    if (mutation == Mutation::DdRepellingDrift && h.kind() == HeatFactor::Kind::Gaussian) {
                        analytic = -(h.y() - x) / p;
                    }
                    drift_forms = std::max(drift_forms, std::fabs(h.drift(x, p) - analytic) / (1.0 + std::fabs(analytic)));
                }
            }
        }
        out.push_back(detail::make("heat_equation_residual", heat, 1e-6));
        out.push_back(detail::make("f_positive", positive > 0.0 ? 0.0 : 1.0, 0.0));
        out.push_back(detail::make("null_vector_residual", nv, 1e-5));
        out.push_back(detail::make("drift_equals_4f'/f", drift_forms, 1e-10));
    }
    {
        double worst = 0.0;
        for (const auto& bc : conditions) {
            if (!std::holds_alternative<SU2>(bc)) continue;
            const SU2Params lo = std::get<SU2>(bc).params();
            const HeatFactor a = HeatFactor::lattice(lo);
            const HeatFactor b = HeatFactor::lattice(to_other_branch(lo));
            for (double p : {0.3, 1.0, 3.0}) {
                for (int i = 1; i < 12; ++i) {
                    const double x = two_pi * i / 12.0;
                    worst = std::max({worst, std::fabs(a.value(x, p) - b.value(x, p)),
                                      std::fabs(a.drift(x, p) - b.drift(x, p)) / (1.0 + std::fabs(a.drift(x, p))),
                                      std::fabs(a.eval_fourier(x, p).f - a.eval_images(x, p).f)});
                }
            }
        }
        out.push_back(detail::make("su2_branch_and_form_invariance", worst, 1e-10));
    }

    // probabilities: sum rule, range, reflections, reductions, anchors.
    {
        double sum_rule = 0.0, range = 0.0;
        for (const auto& bc : conditions) {
            for (double p : {0.3, 1.0, pi, 10.0}) {
                for (int i = 1; i <= 25; ++i) {
                    const double x = two_pi * i / 26.0;
                    const ProbabilityTriple t = probabilities(bc, x, p);
                    sum_rule = std::max(sum_rule, std::fabs(t.sum() - 1.0));
                    for (double c : {t.alpha, t.beta, t.gamma}) range = std::max(range, std::max(-c, c - 1.0));
                }
            }
        }
        out.push_back(detail::make("sum_rule", sum_rule, 1e-12));
        out.push_back(detail::make("probability_range", std::max(range, 0.0), 0.0));
    }
    auto dn = [&](double x, double p) {
        ProbabilityTriple t = dn_probabilities(x, p);
        if (mutation == Mutation::DnPrintedBeta) {
            t.beta = dn_beta_printed_series(x, p);
            t.alpha = 1.0 - t.beta - t.gamma;
        }
        return t;
    };
    {
        double dd_ref = 0.0, dn_ref = 0.0, dn_theta = 0.0;
        for (double p : {0.3, 1.0, pi}) {
            for (int i = 1; i <= 20; ++i) {
                const double x = two_pi * i / 21.0;
                for (double mu : {-1.0, 0.0, 0.7}) {
                    dd_ref = std::max(dd_ref, std::fabs(dd_probabilities(x, p, mu).alpha -
                                                        dd_probabilities(two_pi - x, p, -mu).beta));
                }
                const ProbabilityTriple a = dn(x, p);
                const ProbabilityTriple b = dn(two_pi - x, p);
                dn_ref = std::max({dn_ref, std::fabs(a.alpha - b.beta), std::fabs(a.gamma - b.gamma)});
                const ProbabilityTriple th = dn_probabilities_theta(x, p);
                dn_theta = std::max({dn_theta, std::fabs(a.beta - th.beta), std::fabs(a.gamma - th.gamma)});
            }
        }
        out.push_back(detail::make("dd_reflection", dd_ref, 1e-12));
        out.push_back(detail::make("dn_reflection", dn_ref, 1e-12));
        out.push_back(detail::make("dn_theta_quotient_agreement", dn_theta, 1e-10));
    }
    {
        const ProbabilityTriple t = dn(pi, pi);
        const double g = std::numbers::sqrt2 - 1.0;
        out.push_back(detail::make("dn_exact_constants",
                                   std::max(std::fabs(t.gamma - g), std::fabs(t.beta - (1.0 - g) / 2.0)), 1e-10));
        const ProbabilityTriple d = dd_probabilities(pi, pi, 0.0);
        out.push_back(detail::make("dd_anchor", std::max({std::fabs(d.alpha - 0.2060), std::fabs(d.beta - 0.2060),
                                                           std::fabs(d.gamma - 0.5880)}),
                                   5e-4));
    }
    {
        double reduce = 0.0, dirichlet = 0.0, phase = 0.0, branch = 0.0;
        for (double p : {0.3, 1.0, pi}) {
            for (int i = 1; i <= 20; ++i) {
                const double x = two_pi * i / 21.0;
                const ProbabilityTriple a = su2_probabilities(x, p, complex(0.0, 0.0));
                const ProbabilityTriple b = dn(x, p);
                reduce = std::max({reduce, std::fabs(a.alpha - b.alpha), std::fabs(a.beta - b.beta),
                                   std::fabs(a.gamma - b.gamma)});
                for (double al : {0.4, 1.3, 2.5}) {
                    const complex ad = std::polar(1.0, -(al + pi / 2.0));
                    dirichlet = std::max(dirichlet, std::fabs(su2_probabilities(x, p, ad).gamma));
                }
                const SU2 g1 = SU2::normalized({0.4, -0.3}, {0.5, 0.6});
                const SU2 g2(g1.a(), g1.b() * std::polar(1.0, 1.1));
                const ProbabilityTriple u = probabilities(g1, x, p);
                const ProbabilityTriple v = probabilities(g2, x, p);
                phase = std::max({phase, std::fabs(u.beta - v.beta), std::fabs(u.gamma - v.gamma)});
                const ProbabilityTriple lo = su2_probabilities(x, p, g1.a(), Branch::Lower);
                const ProbabilityTriple up = su2_probabilities(x, p, g1.a(), Branch::Upper);
                branch = std::max({branch, std::fabs(lo.alpha - up.alpha), std::fabs(lo.beta - up.beta),
                                   std::fabs(lo.gamma - up.gamma)});
            }
        }
        out.push_back(detail::make("su2_neumann_reduction", reduce, 1e-12));
        out.push_back(detail::make("su2_pure_dirichlet_no_hit", dirichlet, 1e-14));
        out.push_back(detail::make("su2_b_phase_invariance", phase, 1e-12));
        out.push_back(detail::make("su2_branch_invariance", branch, 1e-12));
    }
    {
        double worst = 0.0;
        for (int i = 1; i < 20; ++i) {
            const double x = two_pi * i / 20.0;
            worst = std::max(worst, std::fabs(schramm_beta(x, 4.0) - (1.0 - x / two_pi)));
        }
        out.push_back(detail::make("schramm_kappa4_closed_form", worst, 1e-12));
    }

    // loewner: vector field forms, cancellation identity.
    {
        double forms = 0.0, cancel = 0.0;
        for (double p : {0.3, 1.0, 2.0, 5.0}) {
            for (int i = 1; i < 16; ++i) {
                const double y = two_pi * i / 16.0;
                forms = std::max({forms, std::fabs(v_field_series(y, p) - v_field_theta(y, p)),
                                  std::fabs(v_field_dy_series(y, p) - v_field_dy_theta(y, p)) /
                                      (1.0 + std::fabs(v_field_dy_series(y, p)))});
                for (const auto& bc : conditions) {
                    const double b = drift(bc, y, p);
                    const double v = v_field(y, p);
                    const double w_drift = v - b;  // deterministic part of dW
                    cancel = std::max(cancel, std::fabs((-w_drift + v) - b) / (1.0 + std::fabs(b)));
                }
            }
        }
        out.push_back(detail::make("vector_field_forms", forms, 1e-10));
        out.push_back(detail::make("y_drift_cancellation", cancel, 1e-10));
    }
    {
        // Dynamic-programming oracle on a coarse grid reproduces the closed form.
        const BoundaryCondition bc = DirichletUncompactified{0.0};
        const ProbabilityTriple o = dp_exit_oracle(bc, pi, pi, 200, 200);
        const ProbabilityTriple c = dd_probabilities(pi, pi, 0.0);
        out.push_back(detail::make("dp_oracle_dd_coarse",
                                   std::max({std::fabs(o.alpha - c.alpha), std::fabs(o.beta - c.beta),
                                             std::fabs(o.gamma - c.gamma)}),
                                   5e-3));
    }
    return out;
}

}  // namespace sle4::checks
