#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "curvednb/convergence_report.hpp"
#include "curvednb/dynamics.hpp"
#include "curvednb/errors.hpp"
#include "curvednb/geometry.hpp"
#include "curvednb/integrate.hpp"
#include "curvednb/potentials.hpp"

namespace curvednb {

/// How states are matched across curvatures: at the identical numeric
/// chart tuple, or with radial coordinates remapped so the pole chords
/// tau stay fixed (the flat-limit device).
enum class ComparisonMode { kSameChartTuple, kChordFixed };

/// What the radial velocity holds fixed across curvatures: the chart
/// rate sdot itself, or the chordal rate taudot = csn(s/2) sdot.
enum class VelocityConvention { kChartFixed, kChordalFixed };

/// One body of a sweep scenario: chordal position plus base velocities.
struct SweepBody {
    ChordalBody pos;
    double s_dot = 0.0;
    double phi_dot = 0.0;
    double theta_dot = 0.0;  // used only when dim = 3
};

/// A kappa -> 0 experiment: curvature list, base scenario, and the
/// matching conventions.
struct SweepSpec {
    std::vector<double> kappas;
    int dim = 2;
    std::vector<double> masses;
    std::vector<SweepBody> bodies;
    ComparisonMode mode = ComparisonMode::kChordFixed;
    VelocityConvention velocity = VelocityConvention::kChartFixed;
    bool gravitational = true;  // cotangent/Newtonian potential vs free motion
};

inline void validate_sweep_spec(const SweepSpec& spec) {
    if (spec.dim != 2 && spec.dim != 3) throw InvalidInputError("sweep: dim must be 2 or 3");
    if (spec.kappas.empty()) throw InvalidInputError("sweep: empty kappa list");
    for (std::size_t i = 0; i < spec.kappas.size(); ++i) {
        if (spec.kappas[i] == 0.0) throw InvalidInputError("sweep: kappa list must exclude 0");
        for (std::size_t j = i + 1; j < spec.kappas.size(); ++j)
            if (spec.kappas[i] == spec.kappas[j]) throw InvalidInputError("sweep: duplicate kappa value");
    }
    if (spec.masses.size() != spec.bodies.size())
        throw InvalidInputError("sweep: masses and bodies count mismatch");
    for (double m : spec.masses)
        if (!(m > 0.0)) throw InvalidInputError("sweep: masses must be > 0");
}

/// The scenario state on the manifold of curvature kappa under the
/// spec's comparison mode and velocity convention. kappa = 0 yields the
/// Newtonian baseline state (identical in both modes).
inline SystemState sweep_state(const SweepSpec& spec, Curvature kappa) {
    SystemState st;
    st.bodies.resize(spec.bodies.size());
    for (std::size_t r = 0; r < spec.bodies.size(); ++r) {
        const SweepBody& b = spec.bodies[r];
        BodyState& out = st.bodies[r];
        if (spec.mode == ComparisonMode::kChordFixed)
            out.q = chordal_to_chart(kappa, b.pos);
        else
            out.q = ChartPoint{b.pos.tau, b.pos.phi, b.pos.theta};
        out.s_dot = b.s_dot;
        out.phi_dot = b.phi_dot;
        out.theta_dot = b.theta_dot;
        if (spec.velocity == VelocityConvention::kChordalFixed)
            out.s_dot = b.s_dot / csn(kappa, out.q.s / 2.0);
    }
    return st;
}

namespace detail {

// Componentwise deviation, relative where the baseline exceeds 1:
// max |a - b| / max(1, |b|).
inline double mixed_norm(const VectorFieldEval& a, const VectorFieldEval& b, int dim) {
    double worst = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
        worst = std::max(worst, std::fabs(a[r].s - b[r].s) / std::max(1.0, std::fabs(b[r].s)));
        worst = std::max(worst, std::fabs(a[r].phi - b[r].phi) / std::max(1.0, std::fabs(b[r].phi)));
        if (dim == 3)
            worst = std::max(worst, std::fabs(a[r].theta - b[r].theta) / std::max(1.0, std::fabs(b[r].theta)));
    }
    return worst;
}

}  // namespace detail

/**
 * Convergence of the curved vector field to the Newtonian one: for each
 * kappa, evaluate the curved RHS at the state the sweep's comparison
 * mode assigns to that curvature and compare
 * against the kappa = 0 RHS at the baseline state, componentwise with
 * the mixed relative/absolute norm.
 */
inline ConvergenceReport vf_convergence(const SweepSpec& spec) {
    validate_sweep_spec(spec);
    const ChartGradFn grad = spec.gravitational ? gravity_gradient() : zero_gradient();
    const ManifoldSpec flat{spec.dim, Curvature{0.0}};
    const SystemState base = sweep_state(spec, Curvature{0.0});
    const VectorFieldEval f0 = rhs_curved(flat, base, spec.masses, grad);

    std::vector<SweepPoint> pts;
    double ref = 0.0;
    for (const auto& a : f0)
        ref = std::max({ref, std::fabs(a.s), std::fabs(a.phi), std::fabs(a.theta)});
    for (double kap : spec.kappas) {
        const Curvature k{kap};
        try {
            const SystemState st = sweep_state(spec, k);
            const VectorFieldEval fk = rhs_curved(ManifoldSpec{spec.dim, k}, st, spec.masses, grad);
            pts.push_back({kap, detail::mixed_norm(fk, f0, spec.dim), false, ""});
        } catch (const Error& e) {
            pts.push_back({kap, 0.0, true, e.what()});
        }
    }
    return make_report(std::move(pts), ref);
}

/// Convergence of the cotangent potential to the Newtonian one over the
/// spec's chordal configuration (positions only; velocities ignored).
inline ConvergenceReport potential_convergence(const SweepSpec& spec) {
    validate_sweep_spec(spec);
    ChordalConfig config;
    config.dim = spec.dim;
    for (const auto& b : spec.bodies) config.bodies.push_back(b.pos);
    return potential_continuity(config, spec.masses, spec.kappas);
}

/**
 * Convergence of integrated flows: each kappa trajectory is compared
 * against the Newtonian trajectory at the shared fixed-step sample
 * times, positions and radial rates in chordal units (tau = 2 sn(s/2),
 * taudot = csn(s/2) sdot). Runs that terminate early are reported as
 * excluded points. Requires the fixed-step method so samples align.
 */
inline ConvergenceReport trajectory_convergence(const SweepSpec& spec, const IntegratorConfig& cfg) {
    validate_sweep_spec(spec);
    if (cfg.method != Method::kRk4)
        throw InvalidInputError("trajectory_convergence: requires method rk4 for aligned sample times");
    const ChartGradFn grad = spec.gravitational ? gravity_gradient() : zero_gradient();

    ChartOde flat{ManifoldSpec{spec.dim, Curvature{0.0}}, spec.masses, grad, spec.gravitational};
    const ChartTrajectory base = integrate_system(flat, sweep_state(spec, Curvature{0.0}), cfg);
    if (base.termination != Termination::kCompleted)
        throw InvalidInputError("trajectory_convergence: baseline run terminated early: " + base.event_detail);

    std::vector<SweepPoint> pts;
    for (double kap : spec.kappas) {
        const Curvature k{kap};
        ChartOde ode{ManifoldSpec{spec.dim, k}, spec.masses, grad, spec.gravitational};
        ChartTrajectory run;
        try {
            run = integrate_system(ode, sweep_state(spec, k), cfg);
        } catch (const Error& e) {
            pts.push_back({kap, 0.0, true, e.what()});
            continue;
        }
        if (run.termination != Termination::kCompleted) {
            pts.push_back({kap, 0.0, true, termination_name(run.termination) + std::string(": ") + run.event_detail});
            continue;
        }
        double worst = 0.0;
        const std::size_t nsamp = std::min(base.states.size(), run.states.size());
        for (std::size_t i = 0; i < nsamp; ++i) {
            for (std::size_t r = 0; r < spec.bodies.size(); ++r) {
                const BodyState& bk = run.states[i].bodies[r];
                const BodyState& b0 = base.states[i].bodies[r];
                const double tau_k = geodesic_to_chord(k, bk.q.s);
                const double taudot_k = csn(k, bk.q.s / 2.0) * bk.s_dot;
                auto dev = [&](double a, double b) {
                    worst = std::max(worst, std::fabs(a - b) / std::max(1.0, std::fabs(b)));
                };
                dev(tau_k, b0.q.s);
                dev(bk.q.phi, b0.q.phi);
                dev(taudot_k, b0.s_dot);
                dev(bk.phi_dot, b0.phi_dot);
                if (spec.dim == 3) {
                    dev(bk.q.theta, b0.q.theta);
                    dev(bk.theta_dot, b0.theta_dot);
                }
            }
        }
        pts.push_back({kap, worst, false, ""});
    }
    return make_report(std::move(pts), 0.0);
}

/// Largest deviation of the pole-to-body chords of the mapped initial
/// configurations from their fixed tau values, across the sweep; the
/// quantity the chord-fixed device holds invariant.
inline double pole_chord_deviation(const SweepSpec& spec) {
    validate_sweep_spec(spec);
    double worst = 0.0;
    for (double kap : spec.kappas) {
        const Curvature k{kap};
        for (const auto& b : spec.bodies) {
            const ChartPoint p = chordal_to_chart(k, b.pos);
            worst = std::max(worst, std::fabs(geodesic_to_chord(k, p.s) - b.pos.tau));
        }
    }
    return worst;
}

}  // namespace curvednb
