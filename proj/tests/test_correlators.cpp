#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sle4/correlators.hpp"
#include "sle4/vector_field.hpp"

using namespace sle4;
using special::pi;
using special::two_pi;
using oracle::d2_dx2;
using oracle::d_dp;

namespace {

std::vector<BoundaryCondition> families() {
    return {DirichletUncompactified{0.0}, DirichletUncompactified{-2.0 * lambda}, DirichletUncompactified{0.5 * lambda},
            DirichletNeumann{}, SU2::normalized({0.3, 0.4}, {0.5, 0.2}), SU2::normalized({-0.7, 0.1}, {0.2, -0.4}),
            SU2::from_a({0.0, 0.9})};
}

TEST(SU2Params, NeumannFamily) {
    const SU2Params s = su2_params({0.0, 0.0});
    EXPECT_NEAR(s.alpha, pi / 2.0, 1e-15);
    EXPECT_EQ(s.omega_plus, 0.5);
    EXPECT_EQ(s.omega_minus, 0.5);
}

TEST(SU2Params, DegenerateMinusI) {
    const SU2Params s = su2_params({0.0, -1.0});
    EXPECT_EQ(s.alpha, 0.0);
    EXPECT_EQ(s.omega_plus, 0.5);
}

TEST(SU2Params, PureDirichletAngle) {
    // a = e^{i mu / sqrt2} gives alpha = pi/2 + mu/sqrt2 folded to [0, pi].
    for (double mu : {0.3, 1.0, -0.8}) {
        const SU2Params s = su2_params(std::polar(1.0, mu / std::numbers::sqrt2));
        const double expected = std::fabs(std::remainder(pi / 2.0 + mu / std::numbers::sqrt2, two_pi));
        EXPECT_NEAR(s.alpha, expected, 1e-12);
        EXPECT_EQ(s.omega_plus + s.omega_minus, 1.0);
    }
}

TEST(SU2, RejectsNonUnitary) {
    EXPECT_THROW(SU2({0.5, 0.0}, {0.5, 0.0}), DomainError);
    EXPECT_THROW(SU2::from_a({1.0, 1.0}), DomainError);
    EXPECT_NO_THROW(SU2({0.6, 0.0}, {0.0, 0.8}));
}

TEST(Bridge, TargetFromMu) {
    EXPECT_NEAR(DirichletUncompactified{lambda}.target(), two_pi, 1e-15);
    EXPECT_NEAR(DirichletUncompactified{-lambda}.target(), 0.0, 1e-15);
}

TEST(Amplitude, DirichletAtSelfDualModulus) {
    EXPECT_NEAR(dd_amplitude(0.0, pi), std::exp(-pi / 8.0) / 0.7682254223260566, 1e-14);
}

TEST(Amplitude, DirichletMaximumAtMinusLambda) {
    const double peak = dd_amplitude(-lambda, 1.3);
    for (double d : {-0.1, -0.01, 0.01, 0.1}) EXPECT_LT(dd_amplitude(-lambda + d, 1.3), peak);
}

TEST(Amplitude, LargeModulusLimits) {
    const double p = 60.0;
    const double y = pi + std::numbers::sqrt2 * 0.3;
    EXPECT_NEAR(dd_amplitude(0.3, p) * special::dedekind_eta(p) / std::sqrt(pi / p), std::exp(-y * y / (8.0 * p)), 1e-12);
    EXPECT_NEAR(dn_amplitude(p) * std::numbers::sqrt2 * std::exp(-p / 12.0), 1.0, 1e-12);
    EXPECT_NEAR(su2_amplitude(0.4, p) * std::numbers::sqrt2 * special::dedekind_eta(p), 1.0, 1e-12);
}

TEST(Amplitude, NeumannSeriesForm) {
    // theta4(0 | 2ip/pi) = 1 + 2 sum (-1)^n e^{-2 n^2 p}.
    for (double p : {0.5, 1.0, pi, 10.0}) {
        double s = 1.0;
        for (int n = 1; n < 40; ++n) s += 2.0 * (n % 2 ? -1.0 : 1.0) * std::exp(-2.0 * n * n * p);
        EXPECT_NEAR(dn_amplitude(p), s / (std::numbers::sqrt2 * special::dedekind_eta(p)), 1e-14 * dn_amplitude(p));
        EXPECT_NEAR(su2_amplitude(pi / 2.0, p), dn_amplitude(p), 1e-14 * dn_amplitude(p));
    }
}

TEST(Amplitude, SU2PureDirichletIsPeriodizedDirichlet) {
    // alpha = pi/2 + mu/sqrt2: sum over windings mu -> mu + 2 sqrt2 pi n.
    for (double p : {0.5, 2.0, 6.0}) {
        for (double mu : {0.0, 0.4, -1.1}) {
            double windings = 0.0;
            for (int n = -20; n <= 20; ++n) windings += dd_amplitude(mu + 2.0 * std::numbers::sqrt2 * pi * n, p);
            EXPECT_NEAR(su2_amplitude(pi / 2.0 + mu / std::numbers::sqrt2, p), windings, 1e-13 * windings);
        }
    }
}

TEST(J3, VanishesForImaginaryA) {
    for (double im : {-0.9, 0.0, 0.5}) EXPECT_EQ(j3_one_point({0.0, im}, 1.0), 0.0);
}

TEST(J3, BoundaryDerivativeConsistency) {
    // f'(0, p) = eta * A<J3>.
    const SU2 g = SU2::normalized({0.6, 0.3}, {0.5, -0.4});
    for (double p : {0.5, 1.0, 3.0}) {
        const double lhs = f_dx(g, 0.0, p);
        const double rhs = special::dedekind_eta(p) * j3_one_point(g.a(), p);
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::fabs(lhs))) << "p=" << p;
    }
}

TEST(J3, DirectSeriesAtQuarterTurn) {
    // alpha = pi/2, Re a = 0.5: only odd n contribute, with alternating signs.
    const complex a(0.5, 0.0);
    const double p = 2.0;
    double s = 0.0;
    for (int n = 1; n < 30; n += 2) s += (n % 4 == 1 ? 1.0 : -1.0) * n * std::exp(-0.5 * n * n * p);
    const double expected = 0.5 / (2.0 * std::numbers::sqrt2 * special::dedekind_eta(p)) * 2.0 * s;
    EXPECT_NEAR(j3_one_point(a, p), expected, 1e-15);
}

TEST(HeatFactor, FourierEqualsImages) {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const SU2 g = SU2::normalized({u(gen), u(gen)}, {u(gen), u(gen)});
        const HeatFactor h = HeatFactor::lattice(g.params());
        for (double p : {0.1, 0.5, 1.5, 4.0, 12.0}) {
            for (double x : {0.0, 0.7, 3.0, 5.9}) {
                const FValue a = h.eval_fourier(x, p);
                const FValue b = h.eval_images(x, p);
                EXPECT_NEAR(a.f, b.f, 1e-13);
                EXPECT_NEAR(a.fx, b.fx, 1e-12);
            }
        }
    }
}

TEST(HeatFactor, SolvesHeatEquation) {
    for (const auto& bc : families()) {
        const HeatFactor h = HeatFactor::from(bc);
        for (double p : {0.2, 0.6, 1.5, 3.0, 8.0}) {
            for (int i = 0; i <= 12; ++i) {
                const double x = two_pi * i / 12.0;
                const double fp = d_dp(h, x, p);
                const double fxx = d2_dx2(h, x, p);
                EXPECT_LE(std::fabs(fp - 2.0 * fxx), 1e-6 * (std::fabs(fp) + std::fabs(fxx) + 1.0))
                    << bc_name(bc) << " x=" << x << " p=" << p;
            }
        }
    }
}

TEST(HeatFactor, PositiveOnRandomMatrices) {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const HeatFactor h = HeatFactor::from(SU2::normalized({u(gen), u(gen)}, {u(gen), u(gen)}));
        for (double p : {0.05, 0.3, 1.0, 5.0, 20.0}) {
            for (int i = 0; i <= 16; ++i) EXPECT_GT(h.value(two_pi * i / 16.0, p), 0.0);
        }
    }
}

TEST(HeatFactor, NeumannReduction) {
    const HeatFactor dn = HeatFactor::from(DirichletNeumann{});
    const HeatFactor su = HeatFactor::from(SU2({0.0, 0.0}, {1.0, 0.0}));
    for (double p : {0.3, 1.0, 5.0}) {
        for (double x : {0.2, pi, 5.0}) {
            EXPECT_NEAR(dn.value(x, p), su.value(x, p), 1e-12);
            EXPECT_NEAR(dn.drift(x, p), su.drift(x, p), 1e-12);
        }
    }
    EXPECT_NEAR(f_factor(SU2::from_a({0.0, 0.0}), pi, 1.0), f_factor(DirichletNeumann{}, pi, 1.0), 1e-12);
}

TEST(HeatFactor, BridgeValueAtTarget) {
    for (double p : {0.5, 2.0}) EXPECT_NEAR(f_factor(DirichletUncompactified{0.3}, DirichletUncompactified{0.3}.target(), p),
                                            std::sqrt(pi / p), 1e-14);
}

TEST(HeatFactor, BranchInvariance) {
    const SU2 g = SU2::normalized({0.2, -0.6}, {0.3, 0.1});
    const HeatFactor lo = HeatFactor::lattice(g.params());
    const HeatFactor up = HeatFactor::lattice(to_other_branch(g.params()));
    for (double p : {0.2, 1.0, 4.0}) {
        for (double x : {0.3, 2.0, 4.4}) {
            EXPECT_NEAR(lo.value(x, p), up.value(x, p), 1e-12);
            EXPECT_NEAR(lo.drift(x, p), up.drift(x, p), 1e-12 * std::max(1.0, std::fabs(lo.drift(x, p))));
        }
    }
}

TEST(HeatFactor, BPhaseInvariance) {
    const SU2 g1 = SU2::normalized({0.4, 0.1}, {0.2, 0.7});
    const SU2 g2(g1.a(), g1.b() * std::polar(1.0, 2.3));
    for (double p : {0.4, 2.0}) {
        for (double x : {0.5, 3.5}) {
            EXPECT_EQ(f_factor(g1, x, p), f_factor(g2, x, p));
            EXPECT_EQ(drift(g1, x, p), drift(g2, x, p));
        }
    }
}

TEST(Drift, ZerosBySymmetry) {
    EXPECT_EQ(drift(DirichletUncompactified{0.4}, DirichletUncompactified{0.4}.target(), 1.0), 0.0);
    for (double p : {0.3, 1.0, 6.0}) EXPECT_NEAR(drift(DirichletNeumann{}, pi, p), 0.0, 1e-13);
}

TEST(Drift, BridgeAttractsTowardTarget) {
    const DirichletUncompactified bc{0.0};
    EXPECT_GT(drift(bc, 1.0, 1.0), 0.0);
    EXPECT_LT(drift(bc, 5.0, 1.0), 0.0);
    EXPECT_NEAR(drift(bc, 1.0, 2.0), (pi - 1.0) / 2.0, 1e-15);
}

TEST(Drift, FourierAndGaussianFormsAgree) {
    const SU2 g = SU2::normalized({0.5, 0.5}, {std::sqrt(0.5), 0.0});
    const HeatFactor h = HeatFactor::from(g);
    for (double p : {0.3, 1.0, 3.0}) {
        const FValue f = h.eval_fourier(1.0, p);
        EXPECT_NEAR(4.0 * f.fx / f.f, h.drift_images(1.0, p), 1e-9);
    }
}

TEST(Drift, EqualsFourTimesLogDerivative) {
    for (const auto& bc : families()) {
        for (double p : {0.1, 0.5, 2.0, 7.0}) {
            for (double x : {0.4, 2.0, 4.5}) {
                const double fd = 4.0 * (std::log(f_factor(bc, x + 1e-6, p)) - std::log(f_factor(bc, x - 1e-6, p))) / 2e-6;
                EXPECT_NEAR(drift(bc, x, p), fd, 1e-6 * std::max(1.0, std::fabs(fd))) << bc_name(bc);
            }
        }
    }
}

TEST(Drift, FiniteWhereFactorUnderflows) {
    // Far from the lattice at small p the factor underflows; the log-scaled drift does not.
    const HeatFactor h = HeatFactor::from(SU2::from_a({0.0, -0.99}));
    const double d = h.drift(pi, 0.002);
    EXPECT_TRUE(std::isfinite(d));
}

TEST(TwoPoint, BoundaryBehaviour) {
    // sqrt(x) times the two-point function tends to f(0, p) / eta.
    for (const auto& bc : families()) {
        const double p = 1.2;
        const double x = 1e-6;
        EXPECT_NEAR(std::sqrt(x) * two_point(bc, x, p), f_factor(bc, 0.0, p) / special::dedekind_eta(p),
                    1e-4 * f_factor(bc, 0.0, p));
    }
}

TEST(TwoPoint, ComposedFromIndependentFactors) {
    const double x = pi, p = pi;
    const double eta = 0.7682254223260566;
    const double th = oracle::theta1_product(0.5, p);
    const double f = std::sqrt(pi / p);  // DD at its target
    EXPECT_NEAR(two_point(DirichletUncompactified{0.0}, x, p), std::sqrt(eta / th) * f, 1e-14);
}

TEST(TwoPoint, ReflectionSymmetry) {
    const DirichletUncompactified bc{0.0};
    for (double x : {0.3, 1.7, 2.9}) EXPECT_NEAR(two_point(bc, x, 0.8), two_point(bc, two_pi - x, 0.8), 1e-12);
}

TEST(NullVector, ResidualSmall) {
    EXPECT_LE(null_vector_residual(DirichletUncompactified{0.0}, pi, pi), 1e-5);
    EXPECT_LE(null_vector_residual(DirichletNeumann{}, pi / 2.0, 1.0), 1e-5);
    EXPECT_LE(null_vector_residual(SU2::normalized({0.3, 0.4}, {0.5, 0.2}), 2.0, 2.0), 1e-5);
}

TEST(NullVector, DetectsWrongFactor) {
    // f(x, 2p) solves d_p f = 4 d_x^2 f instead; the residual must notice.
    const DirichletUncompactified bc{0.0};
    const double x = 2.0, p = 1.0;
    constexpr double h = 1e-4;
    auto g = [&](double xx, double pp) {
        return f_factor(bc, xx, 2.0 * pp) / std::sqrt(std::fabs(special::theta1(xx / two_pi, pp)));
    };
    const double lhs = 2.0 * (g(x + h, p) - 2 * g(x, p) + g(x - h, p)) / (h * h) +
                       v_field(x, p) * (g(x + h, p) - g(x - h, p)) / (2 * h) + v_field_dy(x, p) / 4.0 * g(x, p);
    const double rhs = (g(x, p + h) - g(x, p - h)) / (2 * h);
    const double correct = null_vector_residual(bc, x, p);
    EXPECT_GT(std::fabs(lhs - rhs) / (std::fabs(lhs) + std::fabs(rhs)), 1e3 * correct);
}

}  // namespace
