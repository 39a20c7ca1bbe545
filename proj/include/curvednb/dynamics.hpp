#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "curvednb/errors.hpp"
#include "curvednb/geometry.hpp"
#include "curvednb/ktrig.hpp"
#include "curvednb/potentials.hpp"

namespace curvednb {

/// Chart position and velocity of one body.
struct BodyState {
    ChartPoint q;
    double s_dot = 0.0;
    double phi_dot = 0.0;
    double theta_dot = 0.0;  // used only when dim = 3
};

/// Time plus the chart states of all bodies.
struct SystemState {
    double t = 0.0;
    std::vector<BodyState> bodies;
};

/// Chart accelerations of one body.
struct ChartAccel {
    double s = 0.0;
    double phi = 0.0;
    double theta = 0.0;
};

using VectorFieldEval = std::vector<ChartAccel>;

/// Injection point for the potential term of the vector fields: a
/// configuration-to-gradient callable, so zero-potential (geodesic) and
/// gravitational runs share one code path.
using ChartGradFn = std::function<std::vector<ChartGrad>(const BodySystem&)>;

inline ChartGradFn zero_gradient() {
    return [](const BodySystem& sys) { return std::vector<ChartGrad>(sys.points.size()); };
}

inline ChartGradFn gravity_gradient() {
    return [](const BodySystem& sys) { return grad_chart(sys); };
}

/// Positions-only view of a state, for potential evaluation.
inline BodySystem positions_of(const ManifoldSpec& m, const std::vector<double>& masses,
                               const SystemState& state) {
    BodySystem sys;
    sys.manifold = m;
    sys.masses = masses;
    sys.points.reserve(state.bodies.size());
    for (const auto& b : state.bodies) sys.points.push_back(b.q);
    return sys;
}

/**
 * The curved 2D vector field, total in kappa:
 *   sddot   = -(1/m) dU/ds + phidot^2 sn s csn s
 *   phiddot = -(1/m) sn^{-2} s dU/dphi - 2 sdot phidot ctn s.
 * At kappa = 0 this is the flat polar system (sn s = s, ctn s = 1/s).
 */
inline VectorFieldEval rhs_curved_2d(const SystemState& state, const std::vector<double>& masses,
                                     Curvature kappa, const ChartGradFn& grad) {
    const ManifoldSpec m{2, kappa};
    for (const auto& b : state.bodies) require_chart_regular(m, b.q);
    const auto g = grad(positions_of(m, masses, state));
    VectorFieldEval out(state.bodies.size());
    for (std::size_t r = 0; r < state.bodies.size(); ++r) {
        const BodyState& b = state.bodies[r];
        const double snv = sn(kappa, b.q.s);
        const double csnv = csn(kappa, b.q.s);
        out[r].s = -g[r].s / masses[r] + b.phi_dot * b.phi_dot * snv * csnv;
        out[r].phi = -g[r].phi / (masses[r] * snv * snv) - 2.0 * b.s_dot * b.phi_dot * (csnv / snv);
    }
    return out;
}

/**
 * The curved 3D vector field, total in kappa:
 *   sddot     = -(1/m) dU/ds + (phidot^2 + thetadot^2 sin^2 phi) sn s csn s
 *   phiddot   = -(1/m) sn^{-2} s dU/dphi + thetadot^2 sin phi cos phi
 *               - 2 sdot phidot ctn s
 *   thetaddot = -(1/m) sn^{-2} s sin^{-2} phi dU/dtheta
 *               - 2 sdot thetadot ctn s - 2 phidot thetadot cot phi.
 * The phi centrifugal term carries thetadot^2; the angle-squared variant
 * fails both dimensional analysis and the general Euler-Lagrange
 * derivation, as the numeric oracle confirms.
 */
inline VectorFieldEval rhs_curved_3d(const SystemState& state, const std::vector<double>& masses,
                                     Curvature kappa, const ChartGradFn& grad) {
    const ManifoldSpec m{3, kappa};
    for (const auto& b : state.bodies) require_chart_regular(m, b.q);
    const auto g = grad(positions_of(m, masses, state));
    VectorFieldEval out(state.bodies.size());
    for (std::size_t r = 0; r < state.bodies.size(); ++r) {
        const BodyState& b = state.bodies[r];
        const double snv = sn(kappa, b.q.s);
        const double csnv = csn(kappa, b.q.s);
        const double ctnv = csnv / snv;
        const double sp = std::sin(b.q.phi);
        const double cp = std::cos(b.q.phi);
        out[r].s = -g[r].s / masses[r] +
                   (b.phi_dot * b.phi_dot + b.theta_dot * b.theta_dot * sp * sp) * snv * csnv;
        out[r].phi = -g[r].phi / (masses[r] * snv * snv) + b.theta_dot * b.theta_dot * sp * cp -
                     2.0 * b.s_dot * b.phi_dot * ctnv;
        out[r].theta = -g[r].theta / (masses[r] * snv * snv * sp * sp) -
                       2.0 * b.s_dot * b.theta_dot * ctnv - 2.0 * b.phi_dot * b.theta_dot * (cp / sp);
    }
    return out;
}

/// Dimension dispatch for the curved vector fields.
inline VectorFieldEval rhs_curved(const ManifoldSpec& m, const SystemState& state,
                                  const std::vector<double>& masses, const ChartGradFn& grad) {
    return m.dim == 2 ? rhs_curved_2d(state, masses, m.kappa, grad)
                      : rhs_curved_3d(state, masses, m.kappa, grad);
}

/// One body in Cartesian coordinates (z unused when dim = 2).
struct CartesianBody {
    std::array<double, 3> pos{};
    std::array<double, 3> vel{};
};

struct CartesianState {
    double t = 0.0;
    int dim = 2;
    std::vector<CartesianBody> bodies;
};

/// Newtonian accelerations xddot_r = sum_{j != r} m_j (x_j - x_r)/|x_j - x_r|^3.
inline std::vector<std::array<double, 3>> rhs_newton_cartesian(const CartesianState& state,
                                                               const std::vector<double>& masses) {
    const std::size_t n = state.bodies.size();
    std::vector<std::array<double, 3>> acc(n, {0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            std::array<double, 3> d{};
            double r2 = 0.0;
            for (int c = 0; c < state.dim; ++c) {
                d[c] = state.bodies[j].pos[c] - state.bodies[i].pos[c];
                r2 += d[c] * d[c];
            }
            const double r = std::sqrt(r2);
            if (r < kSingularTol)
                throw SingularConfigurationError(
                    {{static_cast<int>(i), static_cast<int>(j), SingularKind::kCollision, r}});
            const double inv3 = 1.0 / (r2 * r);
            for (int c = 0; c < state.dim; ++c) {
                acc[i][c] += masses[j] * d[c] * inv3;
                acc[j][c] -= masses[i] * d[c] * inv3;
            }
        }
    }
    return acc;
}

/// Total energy E = 1/2 sum m (sdot^2 + sn^2 s phidot^2 [+ sn^2 s sin^2 phi thetadot^2]) + U.
inline double energy(const ManifoldSpec& m, const SystemState& state, const std::vector<double>& masses,
                     const std::function<double(const BodySystem&)>& potential) {
    double kin = 0.0;
    for (std::size_t r = 0; r < state.bodies.size(); ++r) {
        const BodyState& b = state.bodies[r];
        const double sn2 = sn(m.kappa, b.q.s) * sn(m.kappa, b.q.s);
        double v2 = b.s_dot * b.s_dot + sn2 * b.phi_dot * b.phi_dot;
        if (m.dim == 3) {
            const double sp = std::sin(b.q.phi);
            v2 += sn2 * sp * sp * b.theta_dot * b.theta_dot;
        }
        kin += 0.5 * masses[r] * v2;
    }
    return kin + potential(positions_of(m, masses, state));
}

/// Angular momentum about the polar axis:
/// sum m sn^2 s phidot (2D) or sum m sn^2 s sin^2 phi thetadot (3D).
inline double angular_momentum(const ManifoldSpec& m, const SystemState& state,
                               const std::vector<double>& masses) {
    double lz = 0.0;
    for (std::size_t r = 0; r < state.bodies.size(); ++r) {
        const BodyState& b = state.bodies[r];
        const double sn2 = sn(m.kappa, b.q.s) * sn(m.kappa, b.q.s);
        if (m.dim == 2) {
            lz += masses[r] * sn2 * b.phi_dot;
        } else {
            const double sp = std::sin(b.q.phi);
            lz += masses[r] * sn2 * sp * sp * b.theta_dot;
        }
    }
    return lz;
}

// Orthonormal chart frame of the flat (kappa = 0) polar/spherical chart,
// used to transform chart kinematics to Cartesian ones analytically.
namespace detail {

inline std::array<double, 3> e_radial(int dim, const ChartPoint& p) {
    if (dim == 2) return {std::cos(p.phi), std::sin(p.phi), 0.0};
    return {std::sin(p.phi) * std::sin(p.theta), std::sin(p.phi) * std::cos(p.theta), std::cos(p.phi)};
}

inline std::array<double, 3> e_phi(int dim, const ChartPoint& p) {
    if (dim == 2) return {-std::sin(p.phi), std::cos(p.phi), 0.0};
    return {std::cos(p.phi) * std::sin(p.theta), std::cos(p.phi) * std::cos(p.theta), -std::sin(p.phi)};
}

inline std::array<double, 3> e_theta(const ChartPoint& p) {
    return {std::cos(p.theta), -std::sin(p.theta), 0.0};
}

}  // namespace detail

/// Flat-chart state mapped to Cartesian positions and velocities:
/// v = sdot e_r + s phidot e_phi [+ s sin phi thetadot e_theta].
inline CartesianState chart_state_to_cartesian_flat(const ManifoldSpec& m, const SystemState& state) {
    CartesianState cs;
    cs.t = state.t;
    cs.dim = m.dim;
    cs.bodies.resize(state.bodies.size());
    for (std::size_t r = 0; r < state.bodies.size(); ++r) {
        const BodyState& b = state.bodies[r];
        const auto er = detail::e_radial(m.dim, b.q);
        const auto ep = detail::e_phi(m.dim, b.q);
        const auto et = detail::e_theta(b.q);
        const double vth = m.dim == 3 ? b.q.s * std::sin(b.q.phi) * b.theta_dot : 0.0;
        for (int c = 0; c < 3; ++c) {
            cs.bodies[r].pos[c] = b.q.s * er[c];
            cs.bodies[r].vel[c] = b.s_dot * er[c] + b.q.s * b.phi_dot * ep[c] + vth * et[c];
        }
    }
    return cs;
}

/**
 * Chart accelerations of a flat-chart state mapped to Cartesian ones via
 * the analytic frame decomposition
 *   a = (sddot - s phidot^2 - s sin^2 phi thetadot^2) e_r
 *     + (s phiddot + 2 sdot phidot - s sin phi cos phi thetadot^2) e_phi
 *     + (s sin phi thetaddot + 2 sdot sin phi thetadot
 *        + 2 s cos phi phidot thetadot) e_theta,
 * the chain rule x'' = J u'' + u'^T H u' in orthonormal form.
 */
inline std::vector<std::array<double, 3>> chart_accel_to_cartesian_flat(const ManifoldSpec& m,
                                                                        const SystemState& state,
                                                                        const VectorFieldEval& accel) {
    std::vector<std::array<double, 3>> out(state.bodies.size(), {0.0, 0.0, 0.0});
    for (std::size_t r = 0; r < state.bodies.size(); ++r) {
        const BodyState& b = state.bodies[r];
        const auto er = detail::e_radial(m.dim, b.q);
        const auto ep = detail::e_phi(m.dim, b.q);
        const auto et = detail::e_theta(b.q);
        const double sp = std::sin(b.q.phi);
        const double cp = std::cos(b.q.phi);
        double ar = accel[r].s - b.q.s * b.phi_dot * b.phi_dot;
        double aphi = b.q.s * accel[r].phi + 2.0 * b.s_dot * b.phi_dot;
        double atheta = 0.0;
        if (m.dim == 3) {
            ar -= b.q.s * sp * sp * b.theta_dot * b.theta_dot;
            aphi -= b.q.s * sp * cp * b.theta_dot * b.theta_dot;
            atheta = b.q.s * sp * accel[r].theta + 2.0 * b.s_dot * sp * b.theta_dot +
                     2.0 * b.q.s * cp * b.phi_dot * b.theta_dot;
        }
        for (int c = 0; c < 3; ++c) out[r][c] = ar * er[c] + aphi * ep[c] + atheta * et[c];
    }
    return out;
}

}  // namespace curvednb
