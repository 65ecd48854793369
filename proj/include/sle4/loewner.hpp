#pragma once

// Loewner evolution on the cylinder: dg_t(z)/dt = v(g_t(z) - W_t, p - t).
// Driving processes: chordal SLE4 towards a marked boundary point (the
// conditioned process), Zhan's SLE4 (W = 2B), or a constant driver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "sle4/boundary.hpp"
#include "sle4/correlators.hpp"
#include "sle4/error.hpp"
#include "sle4/parallel.hpp"
#include "sle4/rng.hpp"
#include "sle4/sde.hpp"
#include "sle4/special_functions.hpp"
#include "sle4/vector_field.hpp"

namespace sle4 {

enum class Driver {
    Chordal,   // dW = 2 dB + (v - 4 f'/f)(Y) dt, so that dY = -2 dB + 4 f'/f dt
    Zhan,      // dW = 2 dB
    Constant,  // W = w0
};

struct TrackedPoint {
    std::complex<double> z;
    bool absorbed = false;
};

struct LoewnerState {
    double t = 0.0;
    double W = 0.0;
    double Y = 0.0;  // g_t(x) - W_t for the marked point x
    double p = 0.0;  // original modulus; the current one is p - t
    std::vector<TrackedPoint> tracked;
};

struct LoewnerConfig {
    SimConfig sim;                 // x0 is the marked point, W_0 = 0 unless driver is Constant
    Driver driver = Driver::Chordal;
    double w0 = 0.0;               // constant driver value
    bool zero_noise = false;       // B = 0
    double t_stop = -1.0;          // stop time; negative means p - t_cut
    std::vector<std::complex<double>> track;  // points followed by the flow
};

struct LoewnerPath {
    std::vector<LoewnerState> states;  // states[0] at t = 0, then one per step
    ExitOutcome outcome;                // Hit also when stopped at t_stop
    bool exited = false;
};

namespace detail {

inline bool boundary_point(std::complex<double> z) { return z.imag() == 0.0; }

/// Distance from z to the singular set W + 2 pi Z.
inline double distance_to_singularity(std::complex<double> z, double w) {
    return std::abs(std::complex<double>(std::remainder(z.real() - w, special::two_pi), z.imag()));
}

}  // namespace detail

/// Integrates the Loewner flow with the configured driver, path `path_index`.
/// The marked point's relative coordinate Y is advanced with the same step,
/// drift and noise as ExitSimulator, so Y paths coincide with simulate_exit.
/// Tracked points use Euler steps (RK4 for the constant driver).
inline LoewnerPath evolve(const BoundaryCondition& bc, const LoewnerConfig& cfg, std::uint64_t path_index = 0) {
    const SimConfig& sc = cfg.sim;
    sc.validate();
    const DriftSchedule schedule(HeatFactor::from(bc), sc.p, sc.dt0, sc.cutoff());
    rng::PathNoise noise(sc.seed, path_index);
    const double t_stop = (cfg.t_stop < 0.0) ? sc.p - sc.cutoff() : std::min(cfg.t_stop, sc.p - sc.cutoff());

    LoewnerPath path;
    LoewnerState st;
    st.p = sc.p;
    st.W = (cfg.driver == Driver::Constant) ? cfg.w0 : 0.0;
    st.Y = sc.x0;
    for (auto z : cfg.track) {
        detail::require_finite(z.real(), "tracked point");
        detail::require_finite(z.imag(), "tracked point");
        if (z.imag() < 0.0 || z.imag() >= sc.p) throw DomainError("tracked points must satisfy 0 <= Im z < p");
        st.tracked.push_back({z, false});
    }
    path.states.push_back(st);

    for (std::size_t k = 0; k < schedule.size() && st.t < t_stop - 1e-15; ++k) {
        const double dt = schedule.dt(k);
        const double sqdt = schedule.sqrt_dt(k);
        const double s = schedule.remaining(k);
        const double z_noise = cfg.zero_noise ? 0.0 : noise.next_normal();
        const double w_old = st.W;

        // Tracked points move with the old driver value.
        for (auto& tp : st.tracked) {
            if (tp.absorbed) continue;
            if (cfg.driver == Driver::Constant) {
                auto rhs = [&](std::complex<double> z, double rem) { return v_field(z - w_old, rem); };
                const auto k1 = rhs(tp.z, s);
                const auto k2 = rhs(tp.z + 0.5 * dt * k1, s - 0.5 * dt);
                const auto k3 = rhs(tp.z + 0.5 * dt * k2, s - 0.5 * dt);
                const auto k4 = rhs(tp.z + dt * k3, s - dt);
                tp.z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            } else {
                tp.z += dt * v_field(tp.z - w_old, s);
            }
            if (detail::boundary_point(tp.z)) tp.z.imag(0.0);
            if (!std::isfinite(tp.z.real()) || !std::isfinite(tp.z.imag()) ||
                detail::distance_to_singularity(tp.z, w_old) < 1e-9) {
                tp.absorbed = true;
            }
        }

        bool exited = false;
        ExitKind kind = ExitKind::Hit;
        switch (cfg.driver) {
            case Driver::Chordal: {
                const double b = schedule.drift(k, st.Y);
                const double v = v_field(st.Y, s);
                const StepResult r = exit_step(st.Y, b, dt, sqdt, z_noise, sc.barrier_correction, noise, k);
                st.W += 2.0 * sqdt * z_noise + (v - b) * dt;
                st.Y = r.y;
                exited = r.exited;
                kind = r.kind;
                break;
            }
            case Driver::Zhan: {
                const double v = v_field(st.Y, s);
                const StepResult r = exit_step(st.Y, v, dt, sqdt, z_noise, sc.barrier_correction, noise, k);
                st.W += 2.0 * sqdt * z_noise;
                st.Y = r.y;
                exited = r.exited;
                kind = r.kind;
                break;
            }
            case Driver::Constant: {
                // Deterministic: Y follows the flow, RK4.
                auto rhs = [&](double y, double rem) { return v_field(y, rem); };
                const double k1 = rhs(st.Y, s);
                const double k2 = rhs(st.Y + 0.5 * dt * k1, s - 0.5 * dt);
                const double k3 = rhs(st.Y + 0.5 * dt * k2, s - 0.5 * dt);
                const double k4 = rhs(st.Y + dt * k3, s - dt);
                st.Y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if (st.Y <= 0.0 || st.Y >= special::two_pi) {
                    exited = true;
                    kind = st.Y <= 0.0 ? ExitKind::Right : ExitKind::Left;
                }
                break;
            }
        }
        st.t += dt;
        path.states.push_back(st);
        if (exited) {
            path.outcome = {kind, st.t};
            path.exited = true;
            return path;
        }
    }
    path.outcome = {ExitKind::Hit, st.t >= sc.p - sc.cutoff() - 1e-12 ? sc.p : st.t};
    return path;
}

// ---------------------------------------------------------------------------
// Trace reconstruction

struct TracePoint {
    double t = 0.0;
    double re = 0.0;  // Re gamma_t reduced to [0, 2 pi)
    double im = 0.0;
    bool ok = true;
    std::complex<double> raw;  // unreduced backward-flow endpoint
};

/// Driving function sampled on a time grid, linearly interpolated in between.
class DriverPath {
public:
    DriverPath(std::vector<double> times, std::vector<double> values) : t_(std::move(times)), w_(std::move(values)) {
        if (t_.size() != w_.size() || t_.empty()) throw DomainError("driver path needs matching, non-empty samples");
    }

    static DriverPath from(const LoewnerPath& path) {
        std::vector<double> t, w;
        for (const auto& s : path.states) {
            t.push_back(s.t);
            w.push_back(s.W);
        }
        return DriverPath(std::move(t), std::move(w));
    }

    static DriverPath constant(double w0, double t_end) { return DriverPath({0.0, t_end}, {w0, w0}); }

    [[nodiscard]] double operator()(double r) const {
        if (r <= t_.front()) return w_.front();
        if (r >= t_.back()) return w_.back();
        const auto it = std::upper_bound(t_.begin(), t_.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - t_.begin());
        const double a = (r - t_[i - 1]) / (t_[i] - t_[i - 1]);
        return (1.0 - a) * w_[i - 1] + a * w_[i];
    }

    [[nodiscard]] double end_time() const { return t_.back(); }

private:
    std::vector<double> t_;
    std::vector<double> w_;
};

/// Tip of the trace at each sample time, by solving h' = v(h - W_r, p - r)
/// backwards from r = t (h = W_t) to r = 0, where h(0) = gamma_t. The start
/// uses the vertical-slit germ h(t - h0) = W_t + 2i sqrt(h0); RK4 steps are
/// at most dt0 and at most a tenth of both the distance d to the singularity
/// and d^2, the local time scale of the flow.
inline std::vector<TracePoint> trace(const DriverPath& driver, double p, double dt0,
                                     const std::vector<double>& sample_times) {
    detail::require_modulus(p);
    if (!(dt0 > 0.0)) throw DomainError("dt0 must be positive");
    std::vector<TracePoint> out;
    out.reserve(sample_times.size());
    for (double t : sample_times) {
        if (!(t > 0.0 && t < p)) throw DomainError("sample times must lie in (0, p)");
        TracePoint tp;
        tp.t = t;
        const double h0 = std::min(1e-8, 0.1 * t);
        double r = t - h0;
        std::complex<double> h(driver(t), 2.0 * std::sqrt(h0));
        try {
            auto rhs = [&](std::complex<double> z, double rr) {
                const double w = driver(rr);
                if (detail::distance_to_singularity(z, w) < 1e-9) throw NumericError("trace: too close to singularity");
                return v_field(z - w, p - rr);
            };
            while (r > 0.0) {
                const double dist = detail::distance_to_singularity(h, driver(r));
                const double step = std::min({dt0, 0.1 * dist, 0.1 * dist * dist, r});
                const auto k1 = rhs(h, r);
                const auto k2 = rhs(h - 0.5 * step * k1, r - 0.5 * step);
                const auto k3 = rhs(h - 0.5 * step * k2, r - 0.5 * step);
                const auto k4 = rhs(h - step * k3, r - step);
                h -= step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                r -= step;
                if (r < 1e-15) r = 0.0;
            }
            tp.raw = h;
            double re = std::fmod(h.real(), special::two_pi);
            if (re < 0.0) re += special::two_pi;
            tp.re = re;
            tp.im = h.imag();
        } catch (const NumericError&) {
            tp.ok = false;
        }
        out.push_back(tp);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Martingale check

struct MartingalePoint {
    double t = 0.0;
    double mean = 0.0;    // mean of M_t / M_0
    double stderr_ = 0.0;
};

struct MartingaleOptions {
    double band = 0.25;  // stop when Y leaves (band, 2 pi - band)
};

/// M_t = |g_t'(x)|^{1/4} f(Y_t, p - t) / |theta1(Y_t / 2pi | i(p - t)/pi)|^{1/2}.
inline double martingale_value(const HeatFactor& heat, double log_gprime, double y, double s) {
    return std::exp(0.25 * log_gprime) * heat.value(y, s) /
           std::sqrt(std::fabs(special::theta1(y / special::two_pi, s)));
}

/// Estimates E[M_t] / M_0 under Zhan's measure (W = 2B, so dY = -2 dB + v dt
/// and d ln g'_t(x) = v'(Y, p - t) dt). M is only a local martingale: its
/// expectation loses the mass of chordal paths that exit. The check therefore
/// uses M stopped when Y leaves (band, 2 pi - band), which is a true martingale.
inline std::vector<MartingalePoint> martingale_check(const BoundaryCondition& bc, const SimConfig& cfg,
                                                     std::vector<double> t_grid, MartingaleOptions opts = {}) {
    cfg.validate();
    if (t_grid.empty()) throw DomainError("t_grid must not be empty");
    std::sort(t_grid.begin(), t_grid.end());
    for (double t : t_grid) {
        if (!(t > 0.0 && t <= cfg.p / 2.0 + 1e-12)) throw DomainError("t_grid must lie in (0, p/2]");
    }
    if (!(cfg.x0 > opts.band && cfg.x0 < special::two_pi - opts.band)) throw DomainError("x0 must lie inside the band");
    const HeatFactor heat = HeatFactor::from(bc);
    const DriftSchedule schedule(heat, cfg.p, cfg.dt0, cfg.cutoff());
    const double m0 = martingale_value(heat, 0.0, cfg.x0, cfg.p);
    const std::size_t nt = t_grid.size();
    const unsigned workers = std::max(1u, cfg.workers);
    // Per-path values, reduced in path order: the result does not depend on workers.
    std::vector<double> values(cfg.n_paths * nt, 0.0);

    parallel_chunks(cfg.n_paths, workers, [&](unsigned, std::size_t begin, std::size_t end) {
        for (std::size_t path = begin; path < end; ++path) {
            rng::PathNoise noise(cfg.seed, path);
            double y = cfg.x0;
            double lg = 0.0;
            double t = 0.0;
            bool stopped = false;
            double m_stop = 0.0;
            std::size_t next = 0;
            for (std::size_t k = 0; k < schedule.size() && next < nt; ++k) {
                const double s = schedule.remaining(k);
                const double dt = schedule.dt(k);
                const double z = noise.next_normal();
                if (!stopped) {
                    const double v = v_field(y, s);
                    const double vy = v_field_dy(y, s);
                    const double ny = y + v * dt - 2.0 * schedule.sqrt_dt(k) * z;
                    lg += vy * dt;
                    if (!(ny > opts.band && ny < special::two_pi - opts.band)) {
                        stopped = true;
                        // Freeze at the crossing; an overshoot out of (0, 2 pi) keeps the last inside value.
                        const double ye = (ny > 0.0 && ny < special::two_pi) ? ny : y;
                        m_stop = martingale_value(heat, lg, ye, s - dt) / m0;
                    }
                    y = ny;
                }
                t += dt;
                while (next < nt && t >= t_grid[next] - 1e-12) {
                    const double m = stopped ? m_stop : martingale_value(heat, lg, y, s - dt) / m0;
                    values[path * nt + next] = m;
                    ++next;
                }
            }
        }
    });

    std::vector<MartingalePoint> out(nt);
    const double n = static_cast<double>(cfg.n_paths);
    for (std::size_t i = 0; i < nt; ++i) {
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t path = 0; path < cfg.n_paths; ++path) {
            const double m = values[path * nt + i];
            s1 += m;
            s2 += m * m;
        }
        const double mean = s1 / n;
        const double var = std::max(0.0, s2 / n - mean * mean);
        out[i] = {t_grid[i], mean, std::sqrt(var / (n - 1.0))};
    }
    return out;
}

}  // namespace sle4
