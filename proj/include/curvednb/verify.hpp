#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "curvednb/dynamics.hpp"
#include "curvednb/errors.hpp"
#include "curvednb/geometry.hpp"
#include "curvednb/ktrig.hpp"
#include "curvednb/lagrangian_oracle.hpp"
#include "curvednb/linalg.hpp"
#include "curvednb/potentials.hpp"

namespace curvednb {

/// One line of the self-check report.
struct VerifyCheck {
    std::string name;
    bool pass = false;
    double worst_error = 0.0;
    double tolerance = 0.0;
    std::string detail;  // where/what the worst sample was
};

/// Injection point for the closed-form Christoffel table, so a deliberate
/// defect can be planted to confirm the check actually discriminates.
using ChristoffelFn = std::function<ChristoffelTable(const ManifoldSpec&, const ChartPoint&)>;

inline bool all_passed(const std::vector<VerifyCheck>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace detail {

struct WorstTracker {
    double worst = 0.0;
    std::string where;

    void offer(double err, const std::string& loc) {
        if (err > worst) {
            worst = err;
            where = loc;
        }
    }
};

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

/// Random curvature away from zero, both signs, plus occasional
/// magnitudes small enough to cross into the series branch.
inline double draw_kappa(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(0.2, 2.5);
    std::uniform_int_distribution<int> pick(0, 5);
    const int c = pick(rng);
    double k = mag(rng);
    if (c == 4) k *= 1e-7;  // series branch
    if (c == 5) k *= 1e-3;
    return (c % 2 == 0) ? k : -k;
}

/// Radial coordinate comfortably inside the chart for this curvature.
inline double draw_s(std::mt19937_64& rng, double kappa, double lo_frac = 0.1, double hi_frac = 0.9) {
    const double hi = kappa > 0.0 ? M_PI / std::sqrt(kappa) : 3.0;
    std::uniform_real_distribution<double> d(lo_frac * hi, hi_frac * hi);
    return d(rng);
}

/// A chart-regular random body placement with all pairs well separated.
inline BodySystem draw_system(std::mt19937_64& rng, int dim, double kappa, std::size_t nbody) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> polar(0.5, M_PI - 0.5);
    BodySystem sys;
    sys.manifold = ManifoldSpec{dim, Curvature{kappa}};
    std::uniform_real_distribution<double> mass(0.5, 2.0);
    for (int attempt = 0; attempt < 200; ++attempt) {
        sys.masses.clear();
        sys.points.clear();
        for (std::size_t r = 0; r < nbody; ++r) {
            sys.masses.push_back(mass(rng));
            ChartPoint p;
            p.s = draw_s(rng, kappa, 0.2, 0.8);
            p.phi = dim == 2 ? ang(rng) : polar(rng);
            p.theta = dim == 3 ? ang(rng) : 0.0;
            sys.points.push_back(p);
        }
        bool ok = true;
        for (std::size_t i = 0; i < nbody && ok; ++i)
            for (std::size_t j = i + 1; j < nbody && ok; ++j) {
                const double d = geodesic_distance(sys.manifold, sys.points[i], sys.points[j]);
                const double span = kappa > 0.0 ? M_PI / std::sqrt(kappa) : 3.0;
                ok = d > 0.25 * span && d < 0.85 * span;
            }
        if (ok) return sys;
    }
    throw InvalidInputError("draw_system: no admissible configuration found");
}

inline std::string gamma_symbol(int a, int b, int c) {
    std::ostringstream os;
    os << "Gamma^" << (a + 1) << "_{" << (b + 1) << (c + 1) << "}";
    return os.str();
}

inline MetricField metric_field_of(const ManifoldSpec& m) {
    return [m](const std::vector<double>& x) {
        ChartPoint p{x[0], x[1], x.size() > 2 ? x[2] : 0.0};
        return metric(m, p);
    };
}

inline PotentialField potential_field_of(const ManifoldSpec& m, const std::vector<double>& masses) {
    auto u_of = [m, masses](const std::vector<std::vector<double>>& coords) {
        BodySystem sys;
        sys.manifold = m;
        sys.masses = masses;
        for (const auto& x : coords) sys.points.push_back(ChartPoint{x[0], x[1], x.size() > 2 ? x[2] : 0.0});
        return u_gravity(sys);
    };
    return fd_potential(u_of);
}

inline std::vector<double> chart_coords(int dim, const ChartPoint& p) {
    return dim == 2 ? std::vector<double>{p.s, p.phi} : std::vector<double>{p.s, p.phi, p.theta};
}

}  // namespace detail

/// kappa sn^2 + csn^2 = 1 across both branches of the implementation.
inline VerifyCheck check_trig_pythagorean(std::mt19937_64& rng) {
    VerifyCheck ck{"trig-pythagorean", false, 0.0, 1e-12, ""};
    detail::WorstTracker w;
    for (int trial = 0; trial < 400; ++trial) {
        const double k = detail::draw_kappa(rng);
        const double s = detail::draw_s(rng, k, 0.01, 0.99);
        const Curvature kap{k};
        const double lhs = k * sn(kap, s) * sn(kap, s) + csn(kap, s) * csn(kap, s);
        w.offer(std::fabs(lhs - 1.0), "kappa=" + detail::fmt(k) + " s=" + detail::fmt(s));
    }
    ck.worst_error = w.worst;
    ck.detail = w.where;
    ck.pass = w.worst <= ck.tolerance;
    return ck;
}

/// d_sn and d_csn against central differences of sn and csn.
inline VerifyCheck check_trig_derivatives(std::mt19937_64& rng) {
    VerifyCheck ck{"trig-derivatives", false, 0.0, 1e-7, ""};
    detail::WorstTracker w;
    for (int trial = 0; trial < 400; ++trial) {
        const double k = detail::draw_kappa(rng);
        const double s = detail::draw_s(rng, k, 0.05, 0.95);
        const Curvature kap{k};
        const double h = 1e-6 * std::max(1.0, std::fabs(s));
        const double fd_sn = (sn(kap, s + h) - sn(kap, s - h)) / (2.0 * h);
        const double fd_csn = (csn(kap, s + h) - csn(kap, s - h)) / (2.0 * h);
        const std::string loc = "kappa=" + detail::fmt(k) + " s=" + detail::fmt(s);
        w.offer(std::fabs(fd_sn - d_sn(kap, s)), "d_sn at " + loc);
        w.offer(std::fabs(fd_csn - d_csn(kap, s)), "d_csn at " + loc);
    }
    ck.worst_error = w.worst;
    ck.detail = w.where;
    ck.pass = w.worst <= ck.tolerance;
    return ck;
}

/// asn(sn(s)) = s on the principal branch and acsn(csn(s)) = s on (0, range).
inline VerifyCheck check_trig_inverses(std::mt19937_64& rng) {
    VerifyCheck ck{"trig-inverse-roundtrip", false, 0.0, 1e-9, ""};
    detail::WorstTracker w;
    for (int trial = 0; trial < 400; ++trial) {
        const double k = detail::draw_kappa(rng);
        const Curvature kap{k};
        const double principal = k > 0.0 ? 0.5 * M_PI / std::sqrt(k) : 3.0;
        std::uniform_real_distribution<double> ds(0.05 * principal, 0.95 * principal);
        const double s = ds(rng);
        const std::string loc = "kappa=" + detail::fmt(k) + " s=" + detail::fmt(s);
        const double rel = std::max(1.0, std::fabs(s));
        w.offer(std::fabs(asn(kap, sn(kap, s)) - s) / rel, "asn at " + loc);
        if (k != 0.0) {
            std::uniform_real_distribution<double> dc(0.1 * principal, k > 0.0 ? 1.9 * principal : 0.95 * principal);
            const double sc = dc(rng);
            w.offer(std::fabs(acsn(kap, csn(kap, sc)) - sc) / std::max(1.0, sc),
                    "acsn at kappa=" + detail::fmt(k) + " s=" + detail::fmt(sc));
        }
    }
    ck.worst_error = w.worst;
    ck.detail = w.where;
    ck.pass = w.worst <= ck.tolerance;
    return ck;
}

/// G G^{-1} = I for the closed-form metric at random regular points.
inline VerifyCheck check_metric_contraction(std::mt19937_64& rng) {
    VerifyCheck ck{"metric-inverse-contraction", false, 0.0, 1e-12, ""};
    detail::WorstTracker w;
    std::uniform_real_distribution<double> ang(0.3, M_PI - 0.3);
    for (int trial = 0; trial < 200; ++trial) {
        const double k = detail::draw_kappa(rng);
        const int dim = trial % 2 == 0 ? 2 : 3;
        ChartPoint p{detail::draw_s(rng, k, 0.15, 0.85), ang(rng), dim == 3 ? ang(rng) : 0.0};
        const ManifoldSpec m{dim, Curvature{k}};
        const MetricPair mp = metric(m, p);
        w.offer(inverse_residual(mp.g, mp.g_inv),
                "dim=" + std::to_string(dim) + " kappa=" + detail::fmt(k) + " s=" + detail::fmt(p.s));
    }
    ck.worst_error = w.worst;
    ck.detail = w.where;
    ck.pass = w.worst <= ck.tolerance;
    return ck;
}

/// Closed-form Christoffel table against the finite-difference table from
/// the metric alone; the worst deviating symbol is named in the detail.
inline VerifyCheck check_christoffel(std::mt19937_64& rng, bool checked, const ChristoffelFn& gamma) {
    VerifyCheck ck{"christoffel-closed-vs-numeric", false, 0.0, 1e-6, ""};
    detail::WorstTracker w;
    std::uniform_real_distribution<double> ang(0.4, M_PI - 0.4);
    for (int trial = 0; trial < 60; ++trial) {
        const double k = detail::draw_kappa(rng);
        const int dim = trial % 2 == 0 ? 2 : 3;
        const ManifoldSpec m{dim, Curvature{k}};
        ChartPoint p{detail::draw_s(rng, k, 0.25, 0.75), ang(rng), dim == 3 ? ang(rng) : 0.0};
        const ChristoffelTable closed = gamma(m, p);
        const ChristoffelTable numeric =
            christoffel_numeric(detail::metric_field_of(m), detail::chart_coords(dim, p), kOracleStep, checked);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c)
                    w.offer(std::fabs(closed.c[a][b][c] - numeric.c[a][b][c]),
                            detail::gamma_symbol(a, b, c) + " at dim=" + std::to_string(dim) +
                                " kappa=" + detail::fmt(k) + " s=" + detail::fmt(p.s));
    }
    ck.worst_error = w.worst;
    ck.detail = w.where;
    ck.pass = w.worst <= ck.tolerance;
    return ck;
}

/// Hand-coded vector fields against the generic Euler-Lagrange right-hand
/// side assembled from the metric and a finite-difference potential.
inline VerifyCheck check_vector_field(std::mt19937_64& rng, bool checked) {
    VerifyCheck ck{"vector-field-vs-oracle", false, 0.0, 1e-6, ""};
    detail::WorstTracker w;
    std::uniform_real_distribution<double> vel(-0.8, 0.8);
    for (int trial = 0; trial < 24; ++trial) {
        const int dim = trial % 2 == 0 ? 2 : 3;
        const double k = detail::draw_kappa(rng);
        const BodySystem sys = detail::draw_system(rng, dim, k, 2 + trial % 2);

        SystemState st;
        OracleState os;
        for (const auto& p : sys.points) {
            BodyState b;
            b.q = p;
            b.s_dot = vel(rng);
            b.phi_dot = vel(rng);
            b.theta_dot = dim == 3 ? vel(rng) : 0.0;
            st.bodies.push_back(b);
            os.coords.push_back(detail::chart_coords(dim, p));
            os.vels.push_back(dim == 2 ? std::vector<double>{b.s_dot, b.phi_dot}
                                       : std::vector<double>{b.s_dot, b.phi_dot, b.theta_dot});
        }

        const VectorFieldEval hand = rhs_curved(sys.manifold, st, sys.masses, gravity_gradient());
        std::vector<MetricField> metrics(sys.points.size(), detail::metric_field_of(sys.manifold));
        const auto oracle = eom_rhs_general(metrics, detail::potential_field_of(sys.manifold, sys.masses),
                                            sys.masses, os, kOracleStep, checked);
        for (std::size_t r = 0; r < hand.size(); ++r) {
            const double ha[3] = {hand[r].s, hand[r].phi, hand[r].theta};
            for (int i = 0; i < dim; ++i) {
                const double rel = std::max(1.0, std::fabs(oracle[r][static_cast<std::size_t>(i)]));
                w.offer(std::fabs(ha[i] - oracle[r][static_cast<std::size_t>(i)]) / rel,
                        "body " + std::to_string(r) + " coord " + std::to_string(i) + " dim=" +
                            std::to_string(dim) + " kappa=" + detail::fmt(k));
            }
        }
    }
    ck.worst_error = w.worst;
    ck.detail = w.where;
    ck.pass = w.worst <= ck.tolerance;
    return ck;
}

/// Analytic chart gradient against central differences of the potential.
inline VerifyCheck check_gradient(std::mt19937_64& rng) {
    VerifyCheck ck{"gradient-vs-finite-difference", false, 0.0, 1e-6, ""};
    detail::WorstTracker w;
    for (int trial = 0; trial < 24; ++trial) {
        const int dim = trial % 2 == 0 ? 2 : 3;
        const double k = detail::draw_kappa(rng);
        const BodySystem sys = detail::draw_system(rng, dim, k, 3);
        const std::vector<ChartGrad> analytic = grad_chart(sys);
        std::vector<std::vector<double>> coords;
        for (const auto& p : sys.points) coords.push_back(detail::chart_coords(dim, p));
        const PotentialEval pe = detail::potential_field_of(sys.manifold, sys.masses)(coords);
        for (std::size_t r = 0; r < sys.points.size(); ++r) {
            const double ga[3] = {analytic[r].s, analytic[r].phi, analytic[r].theta};
            for (int i = 0; i < dim; ++i) {
                const double rel = std::max(1.0, std::fabs(pe.grad[r][static_cast<std::size_t>(i)]));
                w.offer(std::fabs(ga[i] - pe.grad[r][static_cast<std::size_t>(i)]) / rel,
                        "body " + std::to_string(r) + " coord " + std::to_string(i) + " dim=" +
                            std::to_string(dim) + " kappa=" + detail::fmt(k));
            }
        }
    }
    ck.worst_error = w.worst;
    ck.detail = w.where;
    ck.pass = w.worst <= ck.tolerance;
    return ck;
}

/// The three algebraic forms of the curved pair potential agree.
inline VerifyCheck check_potential_forms(std::mt19937_64& rng) {
    VerifyCheck ck{"potential-three-forms", false, 0.0, 1e-11, ""};
    detail::WorstTracker w;
    for (int trial = 0; trial < 60; ++trial) {
        const int dim = trial % 2 == 0 ? 2 : 3;
        const double k = detail::draw_kappa(rng);
        const BodySystem sys = detail::draw_system(rng, dim, k, 2 + trial % 2);
        const double u = u_cotangent(sys);
        const double rel = std::max(1.0, std::fabs(u));
        const std::string loc = "dim=" + std::to_string(dim) + " kappa=" + detail::fmt(k);
        w.offer(std::fabs(u - u_cotangent_geodesic(sys)) / rel, "geodesic form at " + loc);
        w.offer(std::fabs(u - u_cotangent_ambient(sys)) / rel, "ambient form at " + loc);
    }
    ck.worst_error = w.worst;
    ck.detail = w.where;
    ck.pass = w.worst <= ck.tolerance;
    return ck;
}

/// Flat-chart vector field against Newtonian Cartesian accelerations
/// mapped through the polar/spherical frame.
inline VerifyCheck check_flat_consistency(std::mt19937_64& rng) {
    VerifyCheck ck{"flat-chart-vs-cartesian", false, 0.0, 1e-9, ""};
    detail::WorstTracker w;
    std::uniform_real_distribution<double> vel(-0.6, 0.6);
    for (int trial = 0; trial < 24; ++trial) {
        const int dim = trial % 2 == 0 ? 2 : 3;
        const ManifoldSpec m{dim, Curvature{0.0}};
        const BodySystem sys = detail::draw_system(rng, dim, 0.0, 2);
        SystemState st;
        for (const auto& p : sys.points) {
            BodyState b;
            b.q = p;
            b.s_dot = vel(rng);
            b.phi_dot = vel(rng);
            b.theta_dot = dim == 3 ? vel(rng) : 0.0;
            st.bodies.push_back(b);
        }
        const VectorFieldEval chart_acc = rhs_curved(m, st, sys.masses, gravity_gradient());
        const auto mapped = chart_accel_to_cartesian_flat(m, st, chart_acc);
        const CartesianState cs = chart_state_to_cartesian_flat(m, st);
        const auto newton = rhs_newton_cartesian(cs, sys.masses);
        for (std::size_t r = 0; r < mapped.size(); ++r)
            for (int i = 0; i < 3; ++i) {
                const double rel = std::max(1.0, std::fabs(newton[r][static_cast<std::size_t>(i)]));
                w.offer(std::fabs(mapped[r][static_cast<std::size_t>(i)] - newton[r][static_cast<std::size_t>(i)]) / rel,
                        "body " + std::to_string(r) + " axis " + std::to_string(i) + " dim=" + std::to_string(dim));
            }
    }
    ck.worst_error = w.worst;
    ck.detail = w.where;
    ck.pass = w.worst <= ck.tolerance;
    return ck;
}

/**
 * Deterministic self-check suite: same seed, same report. The optional
 * gamma argument swaps in an alternative closed-form Christoffel table
 * so a planted defect can be shown to trip the comparison.
 */
inline std::vector<VerifyCheck> run_verify_suite(
    unsigned long long seed, bool checked,
    const ChristoffelFn& gamma = [](const ManifoldSpec& m, const ChartPoint& p) {
        return christoffel_closed(m, p);
    }) {
    std::mt19937_64 rng(seed);
    std::vector<VerifyCheck> checks;
    checks.push_back(check_trig_pythagorean(rng));
    checks.push_back(check_trig_derivatives(rng));
    checks.push_back(check_trig_inverses(rng));
    checks.push_back(check_metric_contraction(rng));
    checks.push_back(check_christoffel(rng, checked, gamma));
    checks.push_back(check_vector_field(rng, checked));
    checks.push_back(check_gradient(rng));
    checks.push_back(check_potential_forms(rng));
    checks.push_back(check_flat_consistency(rng));
    return checks;
}

}  // namespace curvednb
