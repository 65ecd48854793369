#pragma once

// First-exit simulation of the relative coordinate Y on (0, 2 pi),
//   dY = -2 dB + 4 f'/f (Y, p - t) dt,
// Monte Carlo estimation of (alpha, beta, gamma), and a dynamic-programming
// oracle for the same exit problem.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "sle4/boundary.hpp"
#include "sle4/correlators.hpp"
#include "sle4/error.hpp"
#include "sle4/parallel.hpp"
#include "sle4/probabilities.hpp"
#include "sle4/rng.hpp"

namespace sle4 {

struct SimConfig {
    double x0 = std::numbers::pi;
    double p = std::numbers::pi;
    double dt0 = 1e-3;
    std::uint64_t n_paths = 100000;
    std::uint64_t seed = 1;
    bool barrier_correction = true;
    double t_cut = 0.0;  // 0 selects dt0
    unsigned workers = 1;

    [[nodiscard]] double cutoff() const { return t_cut > 0.0 ? t_cut : dt0; }

    void validate() const {
        detail::require_finite(x0, "x0");
        detail::require_modulus(p);
        detail::require_finite(dt0, "dt0");
        if (!(x0 > 0.0 && x0 < special::two_pi)) throw DomainError("x0 must lie in (0, 2 pi)");
        if (!(dt0 > 0.0)) throw DomainError("dt0 must be positive");
        if (dt0 > p / 100.0 * (1.0 + 1e-12)) throw DomainError("dt0 must not exceed p/100");
        if (!(cutoff() >= dt0 * (1.0 - 1e-12))) throw DomainError("t_cut must be at least dt0");
        if (cutoff() >= p) throw DomainError("t_cut must be smaller than p");
    }
};

enum class ExitKind { Right, Left, Hit };

inline const char* to_string(ExitKind k) {
    switch (k) {
        case ExitKind::Right: return "right";
        case ExitKind::Left: return "left";
        case ExitKind::Hit: return "hit";
    }
    return "?";
}

struct ExitOutcome {
    ExitKind kind = ExitKind::Hit;
    double tau = 0.0;
};

/// Step size at time t: dt0 away from the terminal time, 0.1 (p - t) near it.
inline double adaptive_step(double dt0, double p, double t) { return std::min(dt0, 0.1 * (p - t)); }

namespace detail {

/// Probability that a Brownian bridge with variance rate 4 between a > 0 and
/// b > 0 over time dt touches 0.
inline double crossing_probability(double a, double b, double dt) {
    const double e = -a * b / (2.0 * dt);
    return e < -40.0 ? 0.0 : std::exp(e);
}

}  // namespace detail

/// One Euler-Maruyama step of Y, shared by the exit simulator and the Loewner
/// evolution so that both produce identical Y paths for the same noise.
struct StepResult {
    double y;
    bool exited;
    ExitKind kind;
};

inline StepResult exit_step(double y, double drift_value, double dt, double sqrt_dt, double normal, bool barrier,
                            const rng::PathNoise& noise, std::uint64_t step) {
    const double next = y + drift_value * dt - 2.0 * sqrt_dt * normal;
    if (next <= 0.0) return {next, true, ExitKind::Right};
    if (next >= special::two_pi) return {next, true, ExitKind::Left};
    if (barrier) {
        const double p0 = detail::crossing_probability(y, next, dt);
        const double p1 = detail::crossing_probability(special::two_pi - y, special::two_pi - next, dt);
        if (p0 > 0.0 || p1 > 0.0) {
            const auto u = noise.barrier_uniforms(step);
            if (u[0] < p0) return {next, true, ExitKind::Right};
            if (u[1] < p1) return {next, true, ExitKind::Left};
        }
    }
    return {next, false, ExitKind::Hit};
}

/// Time grid of a run and the drift on it. Every path uses the same steps
/// (the step size depends on t only), so per-step Fourier coefficients are
/// computed once and shared read-only by all paths.
class DriftSchedule {
public:
    /// Image terms below this log-weight are dropped in the simulation drift.
    static constexpr double image_log_cutoff = -25.0;
    DriftSchedule(const HeatFactor& heat, double p, double dt0, double t_cut) : heat_(heat) {
        const double t_end = p - t_cut;
        double t = 0.0;
        while (t < t_end) {
            Step st;
            st.dt = adaptive_step(dt0, p, t);
            st.sqrt_dt = std::sqrt(st.dt);
            st.s = p - t;
            st.offset = static_cast<std::uint32_t>(coeffs_.size());
            st.terms = 0;
            if (heat.kind() == HeatFactor::Kind::Lattice && st.s >= special::representation_crossover) {
                double a[HeatFactor::max_fourier_terms + 1];
                double b[HeatFactor::max_fourier_terms + 1];
                st.terms = heat.fourier_coefficients(st.s, a, b);
                // Terms below the resolution of the constant 1/sqrt2 do not change f.
                while (st.terms > 1 && std::max(std::fabs(a[st.terms]), std::fabs(b[st.terms])) < 1e-17) --st.terms;
                for (int n = 1; n <= st.terms; ++n) {
                    coeffs_.push_back(a[n]);
                    coeffs_.push_back(b[n]);
                }
            }
            steps_.push_back(st);
            t += st.dt;
        }
    }

    [[nodiscard]] std::size_t size() const { return steps_.size(); }
    [[nodiscard]] double dt(std::size_t k) const { return steps_[k].dt; }
    [[nodiscard]] double sqrt_dt(std::size_t k) const { return steps_[k].sqrt_dt; }
    [[nodiscard]] double remaining(std::size_t k) const { return steps_[k].s; }

    /// 4 f'/f at (y, s_k).
    [[nodiscard]] double drift(std::size_t k, double y) const {
        const Step& st = steps_[k];
        if (heat_.kind() == HeatFactor::Kind::Gaussian) return (heat_.y() - y) / st.s;
        if (st.terms == 0) return heat_.drift_images_truncated(y, st.s, image_log_cutoff);
        const double* c = coeffs_.data() + st.offset;
        // Chebyshev recurrences cos((n+1)u) = 2 cos u cos(nu) - cos((n-1)u), same for sin.
        const double c1 = std::cos(0.5 * y);
        const double s1 = std::sin(0.5 * y);
        const double two_c1 = 2.0 * c1;
        double cp = 1.0, cn = c1, sp = 0.0, sn = s1;
        double f = 0.5 * std::numbers::sqrt2;
        double fx = 0.0;
        for (int n = 1; n <= st.terms; ++n, c += 2) {
            f += c[0] * cn + c[1] * sn;
            fx += (0.5 * n) * (c[1] * cn - c[0] * sn);
            const double cn1 = two_c1 * cn - cp;
            const double sn1 = two_c1 * sn - sp;
            cp = cn;
            sp = sn;
            cn = cn1;
            sn = sn1;
        }
        return 4.0 * fx / f;
    }

private:
    struct Step {
        double dt;
        double sqrt_dt;
        double s;
        std::uint32_t offset;
        int terms;
    };
    HeatFactor heat_;
    std::vector<Step> steps_;
    std::vector<double> coeffs_;
};

/// Simulates single paths of the conditioned process for a fixed boundary
/// condition and configuration.
class ExitSimulator {
public:
    ExitSimulator(const BoundaryCondition& bc, SimConfig cfg)
        : cfg_((cfg.validate(), cfg)), schedule_(HeatFactor::from(bc), cfg_.p, cfg_.dt0, cfg_.cutoff()) {}

    [[nodiscard]] const SimConfig& config() const { return cfg_; }
    [[nodiscard]] const DriftSchedule& schedule() const { return schedule_; }

    /// Runs path `path_index`. Deterministic in (seed, path_index).
    [[nodiscard]] ExitOutcome run(std::uint64_t path_index) const {
        rng::PathNoise noise(cfg_.seed, path_index);
        double y = cfg_.x0;
        double t = 0.0;
        const std::size_t n_steps = schedule_.size();
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double b = schedule_.drift(k, y);
            if (!std::isfinite(b)) {
                throw NumericError("non-finite drift at t = " + std::to_string(t) + ", y = " + std::to_string(y) +
                                   " (path " + std::to_string(path_index) + ")");
            }
            const double dt = schedule_.dt(k);
            const StepResult r = exit_step(y, b, dt, schedule_.sqrt_dt(k), noise.next_normal(),
                                           cfg_.barrier_correction, noise, k);
            t += dt;
            if (r.exited) return {r.kind, t};
            y = r.y;
        }
        return {ExitKind::Hit, cfg_.p};
    }

private:
    SimConfig cfg_;
    DriftSchedule schedule_;
};

inline ExitOutcome simulate_exit(const BoundaryCondition& bc, const SimConfig& cfg, std::uint64_t path_index) {
    return ExitSimulator(bc, cfg).run(path_index);
}

struct ExitCounts {
    std::uint64_t right = 0;
    std::uint64_t left = 0;
    std::uint64_t hit = 0;
    std::uint64_t failed = 0;

    ExitCounts& operator+=(const ExitCounts& o) {
        right += o.right;
        left += o.left;
        hit += o.hit;
        failed += o.failed;
        return *this;
    }
    [[nodiscard]] std::uint64_t completed() const { return right + left + hit; }
};

struct McResult {
    ProbabilityTriple estimate;
    ProbabilityTriple stderr_;
    ExitCounts counts;
    std::uint64_t n_paths = 0;
};

/// Monte Carlo frequencies with binomial standard errors. Paths are split over
/// cfg.workers threads; counts are integers, so the result does not depend on
/// the number of workers. More than 0.1% failed paths is a run-level error.
inline McResult mc_estimate(const BoundaryCondition& bc, const SimConfig& cfg) {
    if (cfg.n_paths < 100) throw DomainError("mc_estimate needs at least 100 paths");
    const ExitSimulator sim(bc, cfg);
    const unsigned workers = std::max(1u, cfg.workers);
    std::vector<ExitCounts> partial(workers);
    parallel_chunks(cfg.n_paths, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
        ExitCounts c;
        for (std::size_t i = begin; i < end; ++i) {
            try {
                switch (sim.run(i).kind) {
                    case ExitKind::Right: ++c.right; break;
                    case ExitKind::Left: ++c.left; break;
                    case ExitKind::Hit: ++c.hit; break;
                }
            } catch (const NumericError&) {
                ++c.failed;
            }
        }
        partial[w] = c;
    });
    McResult r;
    for (const auto& c : partial) r.counts += c;
    r.n_paths = cfg.n_paths;
    if (static_cast<double>(r.counts.failed) > 1e-3 * static_cast<double>(cfg.n_paths)) {
        throw NumericError("mc_estimate: " + std::to_string(r.counts.failed) + " of " + std::to_string(cfg.n_paths) +
                           " paths failed");
    }
    const double n = static_cast<double>(r.counts.completed());
    auto freq = [&](std::uint64_t k) { return static_cast<double>(k) / n; };
    auto se = [&](double q) { return std::sqrt(q * (1.0 - q) / n); };
    r.estimate = {freq(r.counts.right), freq(r.counts.left), freq(r.counts.hit)};
    r.stderr_ = {se(r.estimate.alpha), se(r.estimate.beta), se(r.estimate.gamma)};
    return r;
}

// ---------------------------------------------------------------------------
// Dynamic-programming oracle

struct DpOptions {
    double s_min = 1e-8;  // smallest remaining time; inside there counts as Hit
};

/// Exit probabilities by backward dynamic programming on the uniform grid
/// x_i = 2 pi i / n_space. With s = p - t the remaining time, u(x, s) solves
/// u_s = 2 u_xx + b(x, s) u_x. The explicit scheme uses exponentially fitted
/// diffusion D = 2 Pe coth(Pe), Pe = b dx / 4, which keeps all transition
/// weights non-negative, so it is the generator of a Markov chain on the grid.
/// The step obeys dt <= dx^2 / 8 and dt <= dx^2 / (2 max D); n_time is the
/// minimum number of steps. Returns the grid solution linearly interpolated at x.
inline ProbabilityTriple dp_exit_oracle(const BoundaryCondition& bc, double x, double p, int n_space, int n_time,
                                        DpOptions opts = {}) {
    detail::require_finite(x, "x");
    detail::require_modulus(p);
    if (!(x > 0.0 && x < special::two_pi)) throw DomainError("x must lie in (0, 2 pi)");
    if (n_space < 200 || n_time < 200) throw DomainError("dp_exit_oracle needs n_space >= 200 and n_time >= 200");
    if (!(opts.s_min > 0.0 && opts.s_min < p)) throw DomainError("s_min must lie in (0, p)");
    const HeatFactor heat = HeatFactor::from(bc);
    const int n = n_space;
    const double dx = special::two_pi / n;
    std::vector<double> xs(n + 1);
    for (int i = 0; i <= n; ++i) xs[i] = dx * i;

    // Terminal data at s = s_min: interior points hit; boundary values fixed.
    std::vector<double> ua(n + 1, 0.0), ub(n + 1, 0.0), ug(n + 1, 1.0);
    ua[0] = 1.0;
    ub[n] = 1.0;
    ug[0] = ug[n] = 0.0;
    std::vector<double> na = ua, nb = ub, ng = ug;
    std::vector<double> up(n + 1), dn(n + 1);

    // Drift on the grid. For s >= 1/2 the lattice kind uses its Fourier form
    // with cos(k x_i / 2), sin(k x_i / 2) tabulated once.
    constexpr double fourier_from = 0.5;
    const bool lattice = heat.kind() == HeatFactor::Kind::Lattice;
    const int kmax = HeatFactor::fourier_terms(fourier_from);
    std::vector<double> ctab, stab;
    if (lattice) {
        ctab.resize(static_cast<std::size_t>(kmax + 1) * (n + 1));
        stab.resize(ctab.size());
        for (int k = 1; k <= kmax; ++k) {
            for (int i = 0; i <= n; ++i) {
                ctab[k * (n + 1) + i] = std::cos(0.5 * k * xs[i]);
                stab[k * (n + 1) + i] = std::sin(0.5 * k * xs[i]);
            }
        }
    }
    std::vector<double> row(n + 1), fa(HeatFactor::max_fourier_terms + 1), fb(fa.size());
    std::vector<double> fsum(n + 1), dsum(n + 1);
    auto drift_row = [&](double s) {
        if (!lattice || s < fourier_from) {
            for (int i = 1; i < n; ++i) row[i] = heat.drift(xs[i], s);
            return;
        }
        const int terms = heat.fourier_coefficients(s, fa.data(), fb.data());
        std::fill(fsum.begin(), fsum.end(), 0.5 * std::numbers::sqrt2);
        std::fill(dsum.begin(), dsum.end(), 0.0);
        for (int k = 1; k <= terms; ++k) {
            const double* c = &ctab[k * (n + 1)];
            const double* sn = &stab[k * (n + 1)];
            const double a = fa[k], b = fb[k], h = 0.5 * k;
            for (int i = 1; i < n; ++i) {
                fsum[i] += a * c[i] + b * sn[i];
                dsum[i] += h * (b * c[i] - a * sn[i]);
            }
        }
        for (int i = 1; i < n; ++i) row[i] = 4.0 * dsum[i] / fsum[i];
    };

    const double dx2 = dx * dx;
    const double dt_cap_time = (p - opts.s_min) / n_time;
    double s = opts.s_min;
    while (s < p) {
        drift_row(s);
        double dmax = 2.0;
        for (int i = 1; i < n; ++i) {
            const double b = row[i];
            if (!std::isfinite(b)) throw NumericError("dp_exit_oracle: non-finite drift");
            const double pe = b * dx / 4.0;
            const double d = std::fabs(pe) < 1e-4 ? 2.0 * (1.0 + pe * pe / 3.0) : 2.0 * pe / std::tanh(pe);
            dmax = std::max(dmax, d);
            up[i] = d / dx2 + b / (2.0 * dx);
            dn[i] = d / dx2 - b / (2.0 * dx);
        }
        double dt = std::min({dx2 / 8.0, dx2 / (2.0 * dmax), dt_cap_time, p - s});
        if (dt * (up[1] + dn[1]) > 1.0 + 1e-12) throw NumericError("dp_exit_oracle: stability violated");
        for (int i = 1; i < n; ++i) {
            const double cu = dt * up[i];
            const double cd = dt * dn[i];
            const double cc = 1.0 - cu - cd;
            na[i] = cc * ua[i] + cu * ua[i + 1] + cd * ua[i - 1];
            nb[i] = cc * ub[i] + cu * ub[i + 1] + cd * ub[i - 1];
            ng[i] = cc * ug[i] + cu * ug[i + 1] + cd * ug[i - 1];
        }
        std::swap(ua, na);
        std::swap(ub, nb);
        std::swap(ug, ng);
        s += dt;
        if (p - s < 1e-14 * p) break;
    }
    const double pos = x / dx;
    const int i0 = std::min(n - 1, static_cast<int>(std::floor(pos)));
    const double w = pos - i0;
    auto interp = [&](const std::vector<double>& u) { return (1.0 - w) * u[i0] + w * u[i0 + 1]; };
    return {interp(ua), interp(ub), interp(ug)};
}

struct DpExtrapolation {
    std::array<ProbabilityTriple, 3> levels;  // n, 2n, 4n
    ProbabilityTriple value;                   // Richardson extrapolated
    ProbabilityTriple error;                   // |u3 - u2| / (2^q - 1)
    ProbabilityTriple order;                   // observed order q
};

/// Runs the oracle at n_space = n, 2n, 4n and extrapolates each component with
/// its observed order, clamped to [1, 4].
inline DpExtrapolation dp_exit_oracle_extrapolated(const BoundaryCondition& bc, double x, double p, int n_space = 200,
                                                   int n_time = 200, DpOptions opts = {}) {
    DpExtrapolation out;
    for (int k = 0; k < 3; ++k) out.levels[k] = dp_exit_oracle(bc, x, p, n_space << k, n_time << k, opts);
    auto extrapolate = [](double u1, double u2, double u3, double& value, double& err, double& q) {
        const double d1 = std::fabs(u2 - u1);
        const double d2 = std::fabs(u3 - u2);
        q = (d1 > 0.0 && d2 > 0.0) ? std::log2(d1 / d2) : 2.0;
        q = std::clamp(q, 1.0, 4.0);
        const double denom = std::exp2(q) - 1.0;
        value = u3 + (u3 - u2) / denom;
        err = d2 / denom;
    };
    const auto& l = out.levels;
    extrapolate(l[0].alpha, l[1].alpha, l[2].alpha, out.value.alpha, out.error.alpha, out.order.alpha);
    extrapolate(l[0].beta, l[1].beta, l[2].beta, out.value.beta, out.error.beta, out.order.beta);
    extrapolate(l[0].gamma, l[1].gamma, l[2].gamma, out.value.gamma, out.error.gamma, out.order.gamma);
    return out;
}

}  // namespace sle4
