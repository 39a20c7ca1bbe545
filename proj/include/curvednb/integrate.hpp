#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "curvednb/dynamics.hpp"
#include "curvednb/errors.hpp"

namespace curvednb {

enum class Method { kRk4, kRk45 };

/// Fixed-step (rk4) or embedded adaptive (rk45) configuration.
struct IntegratorConfig {
    Method method = Method::kRk4;
    double dt = 1e-3;  // rk4 step, rk45 initial step
    double tol_abs = 1e-10;
    double tol_rel = 1e-10;
    double dt_min = 1e-12;
    double dt_max = 1.0;
    double t_end = 1.0;
    int sample_stride = 1;  // record every k-th accepted step
};

inline void validate_integrator_config(const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw InvalidInputError("integrator: dt must be > 0");
    if (!(cfg.t_end > 0.0)) throw InvalidInputError("integrator: t_end must be > 0");
    if (cfg.sample_stride < 1) throw InvalidInputError("integrator: sample_stride must be >= 1");
    if (cfg.method == Method::kRk45) {
        if (!(cfg.tol_abs > 0.0) || !(cfg.tol_rel > 0.0))
            throw InvalidInputError("integrator: tolerances must be > 0");
        if (!(cfg.dt_min > 0.0) || !(cfg.dt_max >= cfg.dt_min))
            throw InvalidInputError("integrator: need 0 < dt_min <= dt_max");
    }
}

enum class Termination { kCompleted, kSingularityEvent, kStepUnderflow };

inline const char* termination_name(Termination t) {
    switch (t) {
        case Termination::kCompleted: return "completed";
        case Termination::kSingularityEvent: return "singularity-event";
        default: return "step-underflow";
    }
}

/// Sampled solution of one integration run over flat state vectors.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    Termination termination = Termination::kCompleted;
    std::string event_detail;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
};

using OdeRhs = std::function<std::vector<double>(double, const std::vector<double>&)>;

/// Admissibility test for a proposed state; on failure fills *why.
using OdeGuard = std::function<bool(const std::vector<double>&, std::string*)>;

namespace detail {

inline void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline std::vector<double> rk4_step(const OdeRhs& f, double t, const std::vector<double>& y, double h) {
    const std::vector<double> k1 = f(t, y);
    std::vector<double> tmp = y;
    axpy(tmp, 0.5 * h, k1);
    const std::vector<double> k2 = f(t + 0.5 * h, tmp);
    tmp = y;
    axpy(tmp, 0.5 * h, k2);
    const std::vector<double> k3 = f(t + 0.5 * h, tmp);
    tmp = y;
    axpy(tmp, h, k3);
    const std::vector<double> k4 = f(t + h, tmp);
    std::vector<double> out = y;
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// Dormand-Prince 5(4) tableau.
inline constexpr double kDpC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kDpA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
// 5th-order solution weights equal the last stage row (FSAL); these are
// the differences against the embedded 4th-order weights.
inline constexpr double kDpErr[7] = {71.0 / 57600, 0.0,          -71.0 / 16695, 71.0 / 1920,
                                     -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

}  // namespace detail

/**
 * Explicit integration with pre-acceptance admissibility checks. Each
 * proposed step is guarded; a violation (or an error thrown by the RHS)
 * terminates the run at the last good state with a singularity event.
 * The adaptive method terminates with step-underflow when the required
 * step falls below dt_min. Runs are deterministic: identical inputs
 * produce identical trajectories.
 */
inline Trajectory integrate(const OdeRhs& rhs, const OdeGuard& guard, std::vector<double> y0, double t0,
                            const IntegratorConfig& cfg) {
    validate_integrator_config(cfg);
    Trajectory traj;
    const double t_end = t0 + cfg.t_end;
    double t = t0;
    std::vector<double> y = std::move(y0);
    traj.times.push_back(t);
    traj.states.push_back(y);
    std::size_t since_sample = 0;

    auto record = [&](double tt, const std::vector<double>& yy, bool force) {
        ++since_sample;
        if (force || since_sample >= static_cast<std::size_t>(cfg.sample_stride)) {
            traj.times.push_back(tt);
            traj.states.push_back(yy);
            since_sample = 0;
        }
    };
    auto finish_last = [&](double tt, const std::vector<double>& yy) {
        if (traj.times.back() != tt) {
            traj.times.push_back(tt);
            traj.states.push_back(yy);
        }
    };

    try {
        if (cfg.method == Method::kRk4) {
            while (t < t_end - 1e-15 * std::max(1.0, std::fabs(t_end))) {
                const double h = std::min(cfg.dt, t_end - t);
                std::vector<double> ynew = detail::rk4_step(rhs, t, y, h);
                std::string why;
                if (!guard(ynew, &why)) {
                    traj.termination = Termination::kSingularityEvent;
                    traj.event_detail = why;
                    finish_last(t, y);
                    return traj;
                }
                t += h;
                y = std::move(ynew);
                ++traj.steps_accepted;
                record(t, y, false);
            }
        } else {
            double h = std::min(cfg.dt, cfg.dt_max);
            std::vector<double> k[7];
            k[0] = rhs(t, y);
            while (t < t_end - 1e-15 * std::max(1.0, std::fabs(t_end))) {
                h = std::min(h, t_end - t);
                std::vector<double> ynew;
                for (int s = 1; s < 7; ++s) {
                    std::vector<double> ys = y;
                    for (int j = 0; j < s; ++j) detail::axpy(ys, h * detail::kDpA[s][j], k[j]);
                    if (s == 6) ynew = ys;  // stage 7 sits at the 5th-order solution
                    k[s] = rhs(t + detail::kDpC[s] * h, ys);
                }
                double err = 0.0;
                for (std::size_t i = 0; i < y.size(); ++i) {
                    double e = 0.0;
                    for (int s = 0; s < 7; ++s) e += detail::kDpErr[s] * k[s][i];
                    e *= h;
                    const double sc = cfg.tol_abs + cfg.tol_rel * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
                    err += (e / sc) * (e / sc);
                }
                err = std::sqrt(err / static_cast<double>(y.size()));
                const double factor =
                    err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                if (err <= 1.0) {
                    std::string why;
                    if (!guard(ynew, &why)) {
                        traj.termination = Termination::kSingularityEvent;
                        traj.event_detail = why;
                        finish_last(t, y);
                        return traj;
                    }
                    t += h;
                    y = std::move(ynew);
                    k[0] = k[6];  // FSAL
                    ++traj.steps_accepted;
                    record(t, y, false);
                } else {
                    ++traj.steps_rejected;
                }
                h = std::clamp(h * factor, 0.0, cfg.dt_max);
                if (h < cfg.dt_min) {
                    const double remaining = t_end - t;
                    if (remaining > cfg.dt_min) {
                        traj.termination = Termination::kStepUnderflow;
                        traj.event_detail = "adaptive step fell below dt_min at t = " + std::to_string(t);
                    }
                    finish_last(t, y);
                    return traj;
                }
            }
        }
    } catch (const Error& e) {
        traj.termination = Termination::kSingularityEvent;
        traj.event_detail = e.what();
        finish_last(t, y);
        return traj;
    }
    finish_last(t, y);
    return traj;
}

/// Chart-level ODE bundle: manifold, masses, potential gradient, and the
/// singular-set guard used ahead of every accepted step.
struct ChartOde {
    ManifoldSpec manifold;
    std::vector<double> masses;
    ChartGradFn grad;
    bool check_delta = true;  // pairwise collision/antipodal guard

    std::size_t dof() const noexcept { return masses.size() * static_cast<std::size_t>(manifold.dim); }

    // Layout: per body [s, phi(, theta), s_dot, phi_dot(, theta_dot)].
    std::vector<double> pack(const SystemState& st) const {
        std::vector<double> y;
        y.reserve(2 * dof());
        for (const auto& b : st.bodies) {
            y.push_back(b.q.s);
            y.push_back(b.q.phi);
            if (manifold.dim == 3) y.push_back(b.q.theta);
            y.push_back(b.s_dot);
            y.push_back(b.phi_dot);
            if (manifold.dim == 3) y.push_back(b.theta_dot);
        }
        return y;
    }

    SystemState unpack(double t, const std::vector<double>& y) const {
        SystemState st;
        st.t = t;
        st.bodies.resize(masses.size());
        std::size_t i = 0;
        for (auto& b : st.bodies) {
            b.q.s = y[i++];
            b.q.phi = y[i++];
            if (manifold.dim == 3) b.q.theta = y[i++];
            b.s_dot = y[i++];
            b.phi_dot = y[i++];
            if (manifold.dim == 3) b.theta_dot = y[i++];
        }
        return st;
    }

    std::vector<double> rhs(double t, const std::vector<double>& y) const {
        const SystemState st = unpack(t, y);
        const VectorFieldEval acc = rhs_curved(manifold, st, masses, grad);
        std::vector<double> dy;
        dy.reserve(y.size());
        for (std::size_t r = 0; r < st.bodies.size(); ++r) {
            dy.push_back(st.bodies[r].s_dot);
            dy.push_back(st.bodies[r].phi_dot);
            if (manifold.dim == 3) dy.push_back(st.bodies[r].theta_dot);
            dy.push_back(acc[r].s);
            dy.push_back(acc[r].phi);
            if (manifold.dim == 3) dy.push_back(acc[r].theta);
        }
        return dy;
    }

    bool admissible(const std::vector<double>& y, std::string* why) const {
        const SystemState st = unpack(0.0, y);
        const double smax = manifold.kappa.kappa > 0.0 ? M_PI * manifold.kappa.radius() : 0.0;
        for (std::size_t r = 0; r < st.bodies.size(); ++r) {
            const auto& b = st.bodies[r];
            if (b.q.s <= 0.0) {
                *why = "body " + std::to_string(r) + " reached the pole (s <= 0)";
                return false;
            }
            if (manifold.kappa.kappa > 0.0 && b.q.s >= smax) {
                *why = "body " + std::to_string(r) + " reached the antipode of the pole (s >= pi/sqrt(kappa))";
                return false;
            }
            if (std::fabs(sn(manifold.kappa, b.q.s)) < kChartSingularTol) {
                *why = "body " + std::to_string(r) + " chart-singular: sn(s) below tolerance";
                return false;
            }
            if (manifold.dim == 3) {
                if (b.q.phi <= 0.0 || b.q.phi >= M_PI) {
                    *why = "body " + std::to_string(r) + " left the chart: phi outside (0, pi)";
                    return false;
                }
                if (std::fabs(std::sin(b.q.phi)) < kChartSingularTol) {
                    *why = "body " + std::to_string(r) + " chart-singular: sin(phi) below tolerance";
                    return false;
                }
            }
        }
        if (check_delta) {
            const auto reports = detect_singularities(positions_of(manifold, masses, st));
            if (!reports.empty()) {
                *why = SingularConfigurationError(reports).what();
                return false;
            }
        }
        return true;
    }
};

/// Trajectory in chart-state form.
struct ChartTrajectory {
    std::vector<double> times;
    std::vector<SystemState> states;
    Termination termination = Termination::kCompleted;
    std::string event_detail;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
};

/// Integrate a chart-level system; the initial state must be admissible.
inline ChartTrajectory integrate_system(const ChartOde& ode, const SystemState& initial,
                                        const IntegratorConfig& cfg) {
    std::string why;
    const std::vector<double> y0 = ode.pack(initial);
    if (!ode.admissible(y0, &why)) throw InvalidInputError("initial state inadmissible: " + why);
    Trajectory raw = integrate([&ode](double t, const std::vector<double>& y) { return ode.rhs(t, y); },
                               [&ode](const std::vector<double>& y, std::string* w) {
                                   return ode.admissible(y, w);
                               },
                               y0, initial.t, cfg);
    ChartTrajectory out;
    out.times = std::move(raw.times);
    out.states.reserve(out.times.size());
    for (std::size_t i = 0; i < out.times.size(); ++i) out.states.push_back(ode.unpack(out.times[i], raw.states[i]));
    out.termination = raw.termination;
    out.event_detail = std::move(raw.event_detail);
    out.steps_accepted = raw.steps_accepted;
    out.steps_rejected = raw.steps_rejected;
    return out;
}

}  // namespace curvednb
