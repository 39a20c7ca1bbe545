#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "curvednb/curvednb.hpp"

namespace fs = std::filesystem;

namespace {

using namespace curvednb;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitThreshold = 2;
constexpr int kExitSingular = 3;

struct Options {
    std::string scenario;
    std::string out;
    unsigned long long seed = 2026;
    bool checked = false;
};

void write_text(const fs::path& path, const std::string& text) {
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw ValidationError("write failed: " + path.string());
}

/// Initial configuration echo: both the chart radial coordinate and the
/// pole chord are recorded for every body.
ordered_json initial_json(const Scenario& sc) {
    ordered_json arr = ordered_json::array();
    for (const auto& b : sc.bodies) {
        const double s = chart_radial(sc, b);
        ordered_json jb;
        jb["mass"] = b.mass;
        jb["s"] = s;
        jb["tau"] = geodesic_to_chord(sc.manifold.kappa, s);
        jb["phi"] = b.phi;
        if (sc.manifold.dim == 3) jb["theta"] = b.theta;
        jb["s_dot"] = b.s_dot;
        jb["phi_dot"] = b.phi_dot;
        if (sc.manifold.dim == 3) jb["theta_dot"] = b.theta_dot;
        arr.push_back(jb);
    }
    return arr;
}

/// Max |x(t) - x(0)| / max(1, |x(0)|) over the sampled series.
double max_rel_drift(const std::vector<double>& series) {
    if (series.empty()) return 0.0;
    const double denom = std::max(1.0, std::fabs(series.front()));
    double worst = 0.0;
    for (double v : series) worst = std::max(worst, std::fabs(v - series.front()) / denom);
    return worst;
}

int run_simulate(const Options& opt) {
    const Scenario sc = load_scenario(opt.scenario);
    const SystemState init = initial_state(sc);
    const std::vector<double> masses = scenario_masses(sc);
    const auto potential = scenario_potential(sc);
    const bool gravitational = sc.potential != PotentialKind::kNone;

    if (gravitational) {
        const auto reports = detect_singularities(positions_of(sc.manifold, masses, init));
        if (!reports.empty()) {
            std::cerr << "simulate: " << SingularConfigurationError(reports).what() << "\n";
            return kExitSingular;
        }
    }

    const ChartOde ode{sc.manifold, masses, scenario_gradient(sc), gravitational};
    const auto clock_start = std::chrono::steady_clock::now();
    const ChartTrajectory traj = integrate_system(ode, init, sc.integrator);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();

    std::vector<double> e_series, lz_series;
    e_series.reserve(traj.states.size());
    lz_series.reserve(traj.states.size());
    for (const auto& st : traj.states) {
        e_series.push_back(energy(sc.manifold, st, masses, potential));
        lz_series.push_back(angular_momentum(sc.manifold, st, masses));
    }

    std::ostringstream csv;
    write_trajectory_csv(csv, sc.manifold, masses, potential, traj);
    write_text(fs::path(opt.out) / "trajectory.csv", csv.str());

    ordered_json summary;
    summary["scenario"] = scenario_to_json(sc);
    summary["initial"] = initial_json(sc);
    summary["termination"] = termination_name(traj.termination);
    summary["event_detail"] = traj.event_detail;
    summary["steps_accepted"] = traj.steps_accepted;
    summary["steps_rejected"] = traj.steps_rejected;
    summary["samples"] = traj.times.size();
    summary["t_final"] = traj.times.empty() ? init.t : traj.times.back();
    summary["energy"] = {{"initial", e_series.empty() ? 0.0 : e_series.front()},
                         {"final", e_series.empty() ? 0.0 : e_series.back()},
                         {"max_rel_drift", max_rel_drift(e_series)}};
    summary["angular_momentum_z"] = {{"initial", lz_series.empty() ? 0.0 : lz_series.front()},
                                     {"final", lz_series.empty() ? 0.0 : lz_series.back()},
                                     {"max_rel_drift", max_rel_drift(lz_series)}};
    summary["wall_time_seconds"] = wall;
    write_text(fs::path(opt.out) / "summary.json", summary.dump(2) + "\n");

    std::cout << "simulate: " << termination_name(traj.termination) << ", samples=" << traj.times.size()
              << ", energy max_rel_drift=" << format_g17(max_rel_drift(e_series)) << ", wrote " << opt.out
              << "\n";
    return traj.termination == Termination::kCompleted ? kExitOk : kExitSingular;
}

/// Rows ordered as two sub-tables: kappa > 0 by decreasing magnitude,
/// then kappa < 0 by decreasing magnitude.
std::string report_csv(const ConvergenceReport& rep) {
    std::vector<SweepPoint> rows = rep.points;
    std::stable_sort(rows.begin(), rows.end(), [](const SweepPoint& a, const SweepPoint& b) {
        if ((a.kappa > 0.0) != (b.kappa > 0.0)) return a.kappa > 0.0;
        return std::fabs(a.kappa) > std::fabs(b.kappa);
    });
    std::ostringstream os;
    os << "kappa,error,excluded,note\n";
    for (const auto& p : rows)
        os << format_g17(p.kappa) << "," << format_g17(p.error) << "," << (p.excluded ? 1 : 0) << ",\""
           << p.note << "\"\n";
    return os.str();
}

struct ThresholdOutcome {
    bool passed = true;
    std::vector<std::string> reasons;

    void fail(const std::string& why) {
        passed = false;
        reasons.push_back(why);
    }
};

ThresholdOutcome evaluate_thresholds(const ConvergenceReport& rep, const ExperimentBlock& ex) {
    ThresholdOutcome out;
    for (const auto& p : rep.points)
        if (p.excluded) out.fail("excluded entry at kappa = " + format_g17(p.kappa) + " (" + p.note + ")");

    for (int sign : {+1, -1}) {
        std::size_t usable = 0;
        double smallest_mag = 0.0;
        double smallest_err = 0.0;
        for (const auto& p : rep.points) {
            if (p.excluded || (sign > 0) != (p.kappa > 0.0)) continue;
            ++usable;
            if (usable == 1 || std::fabs(p.kappa) < smallest_mag) {
                smallest_mag = std::fabs(p.kappa);
                smallest_err = p.error;
            }
        }
        if (usable == 0) continue;
        const std::string tag = sign > 0 ? "kappa > 0" : "kappa < 0";
        const FitResult& fit = sign > 0 ? rep.positive : rep.negative;
        if (usable >= 2 && fit.slope < ex.min_slope)
            out.fail(tag + ": slope " + format_g17(fit.slope) + " below " + format_g17(ex.min_slope));
        if (ex.require_monotone && usable >= 2 && !monotone_decreasing(rep.points, sign))
            out.fail(tag + ": errors not monotone decreasing toward kappa = 0");
        if (ex.max_final_rel_error > 0.0) {
            const double bound = ex.max_final_rel_error * std::max(1.0, rep.reference);
            if (smallest_err > bound)
                out.fail(tag + ": final error " + format_g17(smallest_err) + " above " + format_g17(bound));
        }
    }
    return out;
}

int run_sweep(const Options& opt) {
    const Scenario sc = load_scenario(opt.scenario);
    const SweepSpec spec = sweep_spec(sc);
    const ExperimentBlock& ex = *sc.experiment;

    ordered_json out;
    out["experiments"] = ordered_json::array();
    bool all_passed = true;
    for (const std::string& kind : ex.kinds) {
        ConvergenceReport rep;
        if (kind == "vf") {
            rep = vf_convergence(spec);
        } else if (kind == "potential") {
            rep = potential_convergence(spec);
        } else {
            IntegratorConfig cfg = sc.integrator;
            cfg.t_end = ex.t_end;
            rep = trajectory_convergence(spec, cfg);
        }
        const ThresholdOutcome verdict = evaluate_thresholds(rep, ex);
        all_passed = all_passed && verdict.passed;

        write_text(fs::path(opt.out) / ("sweep_" + kind + ".csv"), report_csv(rep));
        ordered_json je;
        je["kind"] = kind;
        je["report"] = report_to_json(rep);
        je["thresholds"] = {{"min_slope", ex.min_slope},
                            {"require_monotone", ex.require_monotone},
                            {"max_final_rel_error", ex.max_final_rel_error}};
        je["passed"] = verdict.passed;
        je["reasons"] = verdict.reasons;
        out["experiments"].push_back(je);

        std::cout << "sweep " << kind << ": slope(kappa>0)=" << format_g17(rep.positive.slope)
                  << " slope(kappa<0)=" << format_g17(rep.negative.slope)
                  << (verdict.passed ? " [pass]" : " [FAIL]") << "\n";
        for (const auto& r : verdict.reasons) std::cout << "  - " << r << "\n";
    }
    out["passed"] = all_passed;
    write_text(fs::path(opt.out) / "sweep.json", out.dump(2) + "\n");
    return all_passed ? kExitOk : kExitThreshold;
}

int run_verify(const Options& opt) {
    const std::vector<VerifyCheck> checks = run_verify_suite(opt.seed, opt.checked);
    ordered_json out;
    out["seed"] = opt.seed;
    out["checked"] = opt.checked;
    out["checks"] = ordered_json::array();
    for (const auto& c : checks) {
        out["checks"].push_back({{"name", c.name},
                                 {"pass", c.pass},
                                 {"worst_error", c.worst_error},
                                 {"tolerance", c.tolerance},
                                 {"detail", c.detail}});
        std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name << ": worst=" << format_g17(c.worst_error)
                  << " tol=" << format_g17(c.tolerance);
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
    }
    out["passed"] = all_passed(checks);
    if (!opt.out.empty()) write_text(fs::path(opt.out) / "verify.json", out.dump(2) + "\n");
    std::cout << (all_passed(checks) ? "verify: all checks passed\n" : "verify: FAILURES present\n");
    return all_passed(checks) ? kExitOk : kExitThreshold;
}

void print_matrix(std::ostream& os, const std::string& label, const SmallMatrix& m) {
    os << label << "\n";
    for (std::size_t i = 0; i < m.order(); ++i) {
        os << " ";
        for (std::size_t j = 0; j < m.order(); ++j) os << " " << format_g17(m(i, j));
        os << "\n";
    }
}

int run_derive(const Options& opt) {
    const Scenario sc = load_scenario(opt.scenario);
    std::ostringstream os;
    os << "manifold: dim=" << sc.manifold.dim << " kappa=" << format_g17(sc.manifold.kappa.kappa) << "\n";
    for (std::size_t r = 0; r < sc.bodies.size(); ++r) {
        const ChartPoint p{chart_radial(sc, sc.bodies[r]), sc.bodies[r].phi, sc.bodies[r].theta};
        os << "\nbody " << r << ": s=" << format_g17(p.s) << " phi=" << format_g17(p.phi);
        if (sc.manifold.dim == 3) os << " theta=" << format_g17(p.theta);
        os << "\n";
        const MetricPair mp = metric(sc.manifold, p);
        print_matrix(os, "metric g_ij:", mp.g);
        print_matrix(os, "inverse g^ij:", mp.g_inv);
        const ChristoffelTable gam = christoffel_closed(sc.manifold, p);
        os << "christoffel (nonzero):\n";
        for (int a = 0; a < sc.manifold.dim; ++a)
            for (int b = 0; b < sc.manifold.dim; ++b)
                for (int c = 0; c < sc.manifold.dim; ++c)
                    if (gam.c[a][b][c] != 0.0)
                        os << "  Gamma^" << (a + 1) << "_{" << (b + 1) << (c + 1)
                           << "} = " << format_g17(gam.c[a][b][c]) << "\n";
    }
    std::cout << os.str();
    if (!opt.out.empty()) write_text(fs::path(opt.out) / "derive.txt", os.str());
    return kExitOk;
}

int dispatch(int which, const Options& opt) {
    try {
        switch (which) {
            case 0: return run_simulate(opt);
            case 1: return run_sweep(opt);
            case 2: return run_verify(opt);
            default: return run_derive(opt);
        }
    } catch (const SingularConfigurationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSingular;
    } catch (const CheckedModeError& e) {
        std::cerr << "checked-mode violation: " << e.what() << "\n";
        return kExitThreshold;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curved n-body workbench: simulation, kappa sweeps, and self-checks"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* sim = app.add_subcommand("simulate", "integrate a scenario and export the trajectory");
    CLI::App* sweep = app.add_subcommand("sweep", "run the scenario's kappa -> 0 experiments");
    CLI::App* verify = app.add_subcommand("verify", "run the randomized invariant self-checks");
    CLI::App* derive = app.add_subcommand("derive", "print metric and christoffel tables at the scenario points");

    for (CLI::App* sub : {sim, sweep, derive})
        sub->add_option("--scenario", opt.scenario, "scenario file (JSON)")->required();
    for (CLI::App* sub : {sim, sweep})
        sub->add_option("--out", opt.out, "output directory")->required();
    for (CLI::App* sub : {verify, derive})
        sub->add_option("--out", opt.out, "output directory (optional)");
    for (CLI::App* sub : {sim, sweep, verify, derive}) {
        sub->add_option("--seed", opt.seed, "seed for randomized sampling");
        sub->add_flag("--checked", opt.checked, "enable oracle-side assertion checks");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    if (sim->parsed()) return dispatch(0, opt);
    if (sweep->parsed()) return dispatch(1, opt);
    if (verify->parsed()) return dispatch(2, opt);
    return dispatch(3, opt);
}
