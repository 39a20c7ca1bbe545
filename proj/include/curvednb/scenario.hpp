#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "curvednb/continuation.hpp"
#include "curvednb/convergence_report.hpp"
#include "curvednb/dynamics.hpp"
#include "curvednb/errors.hpp"
#include "curvednb/geometry.hpp"
#include "curvednb/integrate.hpp"
#include "curvednb/potentials.hpp"

namespace curvednb {

using ordered_json = nlohmann::ordered_json;

enum class PotentialKind { kCotangent, kNone, kNewton };
enum class PositionKind { kChart, kChordal };

/// One body as written in a scenario file: mass, position in the file's
/// convention (chart s or chordal tau), and chart velocities.
struct ScenarioBody {
    double mass = 1.0;
    double radial = 0.0;  // s (chart) or tau (chordal)
    double phi = 0.0;
    double theta = 0.0;
    double s_dot = 0.0;
    double phi_dot = 0.0;
    double theta_dot = 0.0;
};

/// Optional kappa-sweep experiment attached to a scenario.
struct ExperimentBlock {
    std::vector<std::string> kinds;  // subset of {"vf", "potential", "trajectory"}
    std::vector<double> kappas;
    ComparisonMode mode = ComparisonMode::kChordFixed;
    VelocityConvention velocity = VelocityConvention::kChartFixed;
    double t_end = 5.0;  // trajectory experiment horizon
    double min_slope = 0.9;
    bool require_monotone = true;
    double max_final_rel_error = 0.0;  // 0 disables the check
};

/// In-memory form of a scenario file.
struct Scenario {
    ManifoldSpec manifold;
    PositionKind position_kind = PositionKind::kChart;
    PotentialKind potential = PotentialKind::kCotangent;
    std::vector<ScenarioBody> bodies;
    IntegratorConfig integrator;
    std::optional<ExperimentBlock> experiment;
};

namespace detail {

inline const ordered_json& field(const ordered_json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(where + ": missing field '" + key + "'");
    return *it;
}

inline double num_field(const ordered_json& j, const std::string& key, const std::string& where) {
    const auto& v = field(j, key, where);
    if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline double num_or(const ordered_json& j, const std::string& key, double fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : it->get<double>();
}

}  // namespace detail

inline std::string potential_name(PotentialKind k) {
    switch (k) {
        case PotentialKind::kCotangent: return "cotangent";
        case PotentialKind::kNone: return "none";
        default: return "newton";
    }
}

inline std::string mode_name(ComparisonMode m) {
    return m == ComparisonMode::kSameChartTuple ? "same-chart-tuple" : "chord-fixed";
}

inline std::string velocity_name(VelocityConvention v) {
    return v == VelocityConvention::kChartFixed ? "chart-fixed" : "chordal-fixed";
}

inline Scenario parse_scenario(const ordered_json& j) {
    Scenario sc;
    const auto& man = detail::field(j, "manifold", "scenario");
    sc.manifold.dim = static_cast<int>(detail::num_field(man, "dim", "manifold"));
    sc.manifold.kappa.kappa = detail::num_field(man, "kappa", "manifold");
    try {
        validate_manifold(sc.manifold);
    } catch (const Error& e) {
        throw ValidationError(std::string("manifold: ") + e.what());
    }

    const std::string pot = detail::field(j, "potential", "scenario").get<std::string>();
    if (pot == "cotangent")
        sc.potential = PotentialKind::kCotangent;
    else if (pot == "none")
        sc.potential = PotentialKind::kNone;
    else if (pot == "newton")
        sc.potential = PotentialKind::kNewton;
    else
        throw ValidationError("potential: unknown kind '" + pot + "' (expected cotangent|none|newton)");
    if (sc.potential == PotentialKind::kCotangent && sc.manifold.kappa.flat())
        throw ValidationError("potential: cotangent requires kappa != 0");
    if (sc.potential == PotentialKind::kNewton && !sc.manifold.kappa.flat())
        throw ValidationError("potential: newton requires kappa = 0");

    const auto& bodies = detail::field(j, "bodies", "scenario");
    if (!bodies.is_array() || bodies.empty()) throw ValidationError("bodies: expected a non-empty array");
    bool saw_chart = false;
    bool saw_chordal = false;
    for (std::size_t r = 0; r < bodies.size(); ++r) {
        const std::string where = "bodies[" + std::to_string(r) + "]";
        const auto& jb = bodies[r];
        ScenarioBody b;
        b.mass = detail::num_field(jb, "mass", where);
        if (!(b.mass > 0.0))
            throw ValidationError(where + ".mass: must be > 0, got " + std::to_string(b.mass));
        const auto& pos = detail::field(jb, "position", where);
        const bool has_s = pos.contains("s");
        const bool has_tau = pos.contains("tau");
        if (has_s == has_tau)
            throw ValidationError(where + ".position: exactly one of 's' or 'tau' required");
        saw_chart = saw_chart || has_s;
        saw_chordal = saw_chordal || has_tau;
        b.radial = detail::num_field(pos, has_s ? "s" : "tau", where + ".position");
        b.phi = detail::num_field(pos, "phi", where + ".position");
        if (sc.manifold.dim == 3) b.theta = detail::num_field(pos, "theta", where + ".position");
        const auto& vel = detail::field(jb, "velocity", where);
        b.s_dot = detail::num_field(vel, "s_dot", where + ".velocity");
        b.phi_dot = detail::num_field(vel, "phi_dot", where + ".velocity");
        if (sc.manifold.dim == 3) b.theta_dot = detail::num_field(vel, "theta_dot", where + ".velocity");
        sc.bodies.push_back(b);
    }
    if (saw_chart && saw_chordal)
        throw ValidationError("bodies: mixed position conventions (use 's' everywhere or 'tau' everywhere)");
    sc.position_kind = saw_chordal ? PositionKind::kChordal : PositionKind::kChart;

    const auto& integ = detail::field(j, "integrator", "scenario");
    const std::string method = detail::field(integ, "method", "integrator").get<std::string>();
    if (method == "rk4")
        sc.integrator.method = Method::kRk4;
    else if (method == "rk45")
        sc.integrator.method = Method::kRk45;
    else
        throw ValidationError("integrator.method: unknown method '" + method + "' (expected rk4|rk45)");
    sc.integrator.t_end = detail::num_field(integ, "t_end", "integrator");
    if (sc.integrator.method == Method::kRk4) {
        sc.integrator.dt = detail::num_field(integ, "dt", "integrator");
    } else {
        sc.integrator.tol_abs = detail::num_field(integ, "tol_abs", "integrator");
        sc.integrator.tol_rel = detail::num_field(integ, "tol_rel", "integrator");
        sc.integrator.dt_min = detail::num_or(integ, "dt_min", 1e-12);
        sc.integrator.dt_max = detail::num_or(integ, "dt_max", 1.0);
        sc.integrator.dt = detail::num_or(integ, "dt_init", 1e-3);
    }
    sc.integrator.sample_stride = static_cast<int>(detail::num_or(integ, "sample_stride", 1.0));
    try {
        validate_integrator_config(sc.integrator);
    } catch (const Error& e) {
        throw ValidationError(std::string("integrator: ") + e.what());
    }

    if (j.contains("experiment")) {
        const auto& je = j.at("experiment");
        ExperimentBlock ex;
        const auto& kinds = detail::field(je, "kinds", "experiment");
        for (const auto& kind : kinds) {
            const std::string ks = kind.get<std::string>();
            if (ks != "vf" && ks != "potential" && ks != "trajectory")
                throw ValidationError("experiment.kinds: unknown kind '" + ks + "'");
            ex.kinds.push_back(ks);
        }
        if (ex.kinds.empty()) throw ValidationError("experiment.kinds: empty");
        const auto& kappas = detail::field(je, "kappas", "experiment");
        for (const auto& kv : kappas) ex.kappas.push_back(kv.get<double>());
        const std::string mode = je.contains("mode") ? je.at("mode").get<std::string>() : "chord-fixed";
        if (mode == "chord-fixed")
            ex.mode = ComparisonMode::kChordFixed;
        else if (mode == "same-chart-tuple")
            ex.mode = ComparisonMode::kSameChartTuple;
        else
            throw ValidationError("experiment.mode: unknown mode '" + mode + "'");
        const std::string vel =
            je.contains("velocity_convention") ? je.at("velocity_convention").get<std::string>() : "chart-fixed";
        if (vel == "chart-fixed")
            ex.velocity = VelocityConvention::kChartFixed;
        else if (vel == "chordal-fixed")
            ex.velocity = VelocityConvention::kChordalFixed;
        else
            throw ValidationError("experiment.velocity_convention: unknown convention '" + vel + "'");
        ex.t_end = detail::num_or(je, "t_end", 5.0);
        if (je.contains("thresholds")) {
            const auto& th = je.at("thresholds");
            ex.min_slope = detail::num_or(th, "min_slope", 0.9);
            ex.require_monotone = th.contains("require_monotone") ? th.at("require_monotone").get<bool>() : true;
            ex.max_final_rel_error = detail::num_or(th, "max_final_rel_error", 0.0);
        }
        sc.experiment = std::move(ex);
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file: " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("scenario parse error in " + path + ": " + e.what());
    }
    try {
        return parse_scenario(j);
    } catch (const ValidationError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("scenario field error in " + path + ": " + e.what());
    }
}

/// Canonical JSON form: exactly the consumed fields, in fixed order.
inline ordered_json scenario_to_json(const Scenario& sc) {
    ordered_json j;
    j["manifold"] = {{"dim", sc.manifold.dim}, {"kappa", sc.manifold.kappa.kappa}};
    j["potential"] = potential_name(sc.potential);
    j["bodies"] = ordered_json::array();
    for (const auto& b : sc.bodies) {
        ordered_json pos;
        pos[sc.position_kind == PositionKind::kChart ? "s" : "tau"] = b.radial;
        pos["phi"] = b.phi;
        if (sc.manifold.dim == 3) pos["theta"] = b.theta;
        ordered_json vel;
        vel["s_dot"] = b.s_dot;
        vel["phi_dot"] = b.phi_dot;
        if (sc.manifold.dim == 3) vel["theta_dot"] = b.theta_dot;
        j["bodies"].push_back({{"mass", b.mass}, {"position", pos}, {"velocity", vel}});
    }
    ordered_json integ;
    integ["method"] = sc.integrator.method == Method::kRk4 ? "rk4" : "rk45";
    integ["t_end"] = sc.integrator.t_end;
    if (sc.integrator.method == Method::kRk4) {
        integ["dt"] = sc.integrator.dt;
    } else {
        integ["tol_abs"] = sc.integrator.tol_abs;
        integ["tol_rel"] = sc.integrator.tol_rel;
        integ["dt_min"] = sc.integrator.dt_min;
        integ["dt_max"] = sc.integrator.dt_max;
        integ["dt_init"] = sc.integrator.dt;
    }
    integ["sample_stride"] = sc.integrator.sample_stride;
    j["integrator"] = integ;
    if (sc.experiment) {
        const ExperimentBlock& ex = *sc.experiment;
        ordered_json je;
        je["kinds"] = ex.kinds;
        je["kappas"] = ex.kappas;
        je["mode"] = mode_name(ex.mode);
        je["velocity_convention"] = velocity_name(ex.velocity);
        je["t_end"] = ex.t_end;
        je["thresholds"] = {{"min_slope", ex.min_slope},
                            {"require_monotone", ex.require_monotone},
                            {"max_final_rel_error", ex.max_final_rel_error}};
        j["experiment"] = je;
    }
    return j;
}

/// Chart radial coordinate of a scenario body (chordal files convert at
/// load through chord_to_geodesic).
inline double chart_radial(const Scenario& sc, const ScenarioBody& b) {
    if (sc.position_kind == PositionKind::kChart) return b.radial;
    try {
        return chord_to_geodesic(sc.manifold.kappa, b.radial);
    } catch (const Error& e) {
        throw ValidationError(std::string("position: ") + e.what());
    }
}

/// Initial chart state of a scenario.
inline SystemState initial_state(const Scenario& sc) {
    SystemState st;
    st.bodies.reserve(sc.bodies.size());
    for (const auto& b : sc.bodies) {
        BodyState bs;
        bs.q = ChartPoint{chart_radial(sc, b), b.phi, b.theta};
        try {
            validate_chart_point(sc.manifold, bs.q);
        } catch (const Error& e) {
            throw ValidationError(std::string("position: ") + e.what());
        }
        bs.s_dot = b.s_dot;
        bs.phi_dot = b.phi_dot;
        bs.theta_dot = b.theta_dot;
        st.bodies.push_back(bs);
    }
    return st;
}

inline std::vector<double> scenario_masses(const Scenario& sc) {
    std::vector<double> m;
    m.reserve(sc.bodies.size());
    for (const auto& b : sc.bodies) m.push_back(b.mass);
    return m;
}

/// Gradient callable for the scenario's potential kind.
inline ChartGradFn scenario_gradient(const Scenario& sc) {
    return sc.potential == PotentialKind::kNone ? zero_gradient() : gravity_gradient();
}

/// Potential value callable matching scenario_gradient.
inline std::function<double(const BodySystem&)> scenario_potential(const Scenario& sc) {
    if (sc.potential == PotentialKind::kNone) return [](const BodySystem&) { return 0.0; };
    return [](const BodySystem& sys) { return u_gravity(sys); };
}

/// Sweep specification of the scenario's experiment block. The base
/// chordal configuration comes from the scenario positions (chart files
/// convert through geodesic_to_chord on the scenario manifold).
inline SweepSpec sweep_spec(const Scenario& sc) {
    if (!sc.experiment) throw ValidationError("scenario has no experiment block");
    SweepSpec spec;
    spec.kappas = sc.experiment->kappas;
    spec.dim = sc.manifold.dim;
    spec.masses = scenario_masses(sc);
    spec.mode = sc.experiment->mode;
    spec.velocity = sc.experiment->velocity;
    spec.gravitational = sc.potential != PotentialKind::kNone;
    for (const auto& b : sc.bodies) {
        SweepBody sb;
        const double s = chart_radial(sc, b);
        sb.pos = ChordalBody{geodesic_to_chord(sc.manifold.kappa, s), b.phi, b.theta};
        sb.s_dot = b.s_dot;
        sb.phi_dot = b.phi_dot;
        sb.theta_dot = b.theta_dot;
        spec.bodies.push_back(sb);
    }
    try {
        validate_sweep_spec(spec);
    } catch (const Error& e) {
        throw ValidationError(std::string("experiment: ") + e.what());
    }
    return spec;
}

/// Fixed-width numeric formatting used by all table output.
inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/**
 * Trajectory table: a header row, then one comma-separated row per
 * sample with t, per-body chart coordinates and velocities, and the
 * sampled E and L_z. All numbers carry 17 significant digits.
 */
inline void write_trajectory_csv(std::ostream& out, const ManifoldSpec& m, const std::vector<double>& masses,
                                 const std::function<double(const BodySystem&)>& potential,
                                 const ChartTrajectory& traj) {
    out << "t";
    for (std::size_t r = 0; r < masses.size(); ++r) {
        const std::string b = "b" + std::to_string(r);
        out << "," << b << ".s," << b << ".phi";
        if (m.dim == 3) out << "," << b << ".theta";
        out << "," << b << ".s_dot," << b << ".phi_dot";
        if (m.dim == 3) out << "," << b << ".theta_dot";
    }
    out << ",E,L_z\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const SystemState& st = traj.states[i];
        out << format_g17(traj.times[i]);
        for (const auto& b : st.bodies) {
            out << "," << format_g17(b.q.s) << "," << format_g17(b.q.phi);
            if (m.dim == 3) out << "," << format_g17(b.q.theta);
            out << "," << format_g17(b.s_dot) << "," << format_g17(b.phi_dot);
            if (m.dim == 3) out << "," << format_g17(b.theta_dot);
        }
        out << "," << format_g17(energy(m, st, masses, potential)) << ","
            << format_g17(angular_momentum(m, st, masses)) << "\n";
    }
}

inline ordered_json fit_to_json(const FitResult& f) {
    return {{"slope", f.slope},
            {"intercept", f.intercept},
            {"residual", f.residual},
            {"points_used", f.points_used}};
}

inline ordered_json report_to_json(const ConvergenceReport& r) {
    ordered_json j;
    j["points"] = ordered_json::array();
    for (const auto& p : r.points) {
        ordered_json jp = {{"kappa", p.kappa}, {"error", p.error}, {"excluded", p.excluded}};
        if (!p.note.empty()) jp["note"] = p.note;
        j["points"].push_back(jp);
    }
    j["fit"] = fit_to_json(r.overall);
    j["fit_positive"] = fit_to_json(r.positive);
    j["fit_negative"] = fit_to_json(r.negative);
    j["reference"] = r.reference;
    return j;
}

}  // namespace curvednb
