#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "curvednb/errors.hpp"
#include "curvednb/geometry.hpp"
#include "curvednb/linalg.hpp"

namespace curvednb {

// Central-difference step used by the oracle, scaled per coordinate by
// max(1, |x|); balances truncation against rounding in double precision.
inline constexpr double kOracleStep = 1e-5;

/// Metric tensor callable for one body's configuration slot: coordinate
/// vector -> (G, G^{-1}).
using MetricField = std::function<MetricPair(const std::vector<double>&)>;

/// Wrap a G-only callable into a MetricField whose inverse is computed
/// by elimination; a singular G surfaces as InvalidInputError.
inline MetricField with_numeric_inverse(std::function<SmallMatrix(const std::vector<double>&)> g_of) {
    return [g_of = std::move(g_of)](const std::vector<double>& x) {
        SmallMatrix g = g_of(x);
        return MetricPair{g, inverse(g)};
    };
}

/// Potential value and its per-body, per-coordinate partials.
struct PotentialEval {
    double u = 0.0;
    std::vector<std::vector<double>> grad;
};

/// Configuration callable: per-body coordinate vectors -> PotentialEval.
using PotentialField = std::function<PotentialEval(const std::vector<std::vector<double>>&)>;

/// Build a PotentialField from a scalar U by central finite differences
/// of step h * max(1, |coordinate|).
inline PotentialField fd_potential(std::function<double(const std::vector<std::vector<double>>&)> u_of,
                                   double h = 1e-6) {
    return [u_of = std::move(u_of), h](const std::vector<std::vector<double>>& x) {
        PotentialEval ev;
        ev.u = u_of(x);
        ev.grad.resize(x.size());
        std::vector<std::vector<double>> probe = x;
        for (std::size_t r = 0; r < x.size(); ++r) {
            ev.grad[r].resize(x[r].size());
            for (std::size_t i = 0; i < x[r].size(); ++i) {
                const double step = h * std::max(1.0, std::fabs(x[r][i]));
                probe[r][i] = x[r][i] + step;
                const double up = u_of(probe);
                probe[r][i] = x[r][i] - step;
                const double um = u_of(probe);
                probe[r][i] = x[r][i];
                ev.grad[r][i] = (up - um) / (2.0 * step);
            }
        }
        return ev;
    };
}

namespace detail {

inline void check_metric_symmetry(const SmallMatrix& g) {
    const std::size_t n = g.order();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(g(i, j) - g(j, i)) > 1e-14)
                throw CheckedModeError("metric symmetry violated: |g(" + std::to_string(i) + "," +
                                       std::to_string(j) + ") - g(" + std::to_string(j) + "," +
                                       std::to_string(i) + ")| > 1e-14");
}

}  // namespace detail

/**
 * Christoffel symbols from an arbitrary metric by central differences:
 * Gamma^s_{lj} = 1/2 sum_i g^{si} (d_j g_il + d_l g_ij - d_i g_lj).
 * Symmetric in (l, j) by construction. In checked mode every metric
 * evaluation is symmetry-tested and the G G^{-1} contraction at p is
 * validated against the identity to 1e-10.
 */
inline ChristoffelTable christoffel_numeric(const MetricField& metric, const std::vector<double>& p,
                                            double h = kOracleStep, bool checked = false) {
    const std::size_t n = p.size();
    if (n == 0 || n > 3) throw InvalidInputError("christoffel_numeric: dimension must be 1..3");

    const MetricPair at_p = metric(p);
    if (checked) {
        detail::check_metric_symmetry(at_p.g);
        if (inverse_residual(at_p.g, at_p.g_inv) > 1e-10)
            throw CheckedModeError("metric inverse contraction deviates from identity beyond 1e-10");
    }

    // dg[m][i][j] = d g_ij / d x_m
    double dg[3][3][3] = {};
    std::vector<double> probe = p;
    for (std::size_t m = 0; m < n; ++m) {
        const double step = h * std::max(1.0, std::fabs(p[m]));
        probe[m] = p[m] + step;
        const SmallMatrix gp = metric(probe).g;
        probe[m] = p[m] - step;
        const SmallMatrix gm = metric(probe).g;
        probe[m] = p[m];
        if (checked) {
            detail::check_metric_symmetry(gp);
            detail::check_metric_symmetry(gm);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) dg[m][i][j] = (gp(i, j) - gm(i, j)) / (2.0 * step);
    }

    ChristoffelTable t;
    t.dim = static_cast<int>(n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    acc += at_p.g_inv(s, i) * (dg[j][i][l] + dg[l][i][j] - dg[i][l][j]);
                t.c[s][l][j] = 0.5 * acc;
            }
    return t;
}

/// Positions and velocities of the N bodies as plain coordinate vectors.
struct OracleState {
    std::vector<std::vector<double>> coords;
    std::vector<std::vector<double>> vels;
};

/**
 * General equations of motion with numerically differentiated
 * Christoffels: per body r and coordinate s,
 *   xddot_s = -(1/m_r) sum_i g^{si} dU/dx_i - sum_{l,j} Gamma^s_{lj} xdot_l xdot_j.
 * The brute-force reference for the hand-coded vector fields.
 */
inline std::vector<std::vector<double>> eom_rhs_general(const std::vector<MetricField>& metrics,
                                                        const PotentialField& potential,
                                                        const std::vector<double>& masses,
                                                        const OracleState& state, double h = kOracleStep,
                                                        bool checked = false) {
    const std::size_t nbody = state.coords.size();
    if (metrics.size() != nbody || masses.size() != nbody || state.vels.size() != nbody)
        throw InvalidInputError("eom_rhs_general: inconsistent body counts");

    const PotentialEval pe = potential(state.coords);
    std::vector<std::vector<double>> accels(nbody);
    for (std::size_t r = 0; r < nbody; ++r) {
        const std::size_t n = state.coords[r].size();
        const MetricPair mp = metrics[r](state.coords[r]);
        if (checked) {
            detail::check_metric_symmetry(mp.g);
            if (inverse_residual(mp.g, mp.g_inv) > 1e-10)
                throw CheckedModeError("metric inverse contraction deviates from identity beyond 1e-10 (body " +
                                       std::to_string(r) + ")");
        }
        const ChristoffelTable gam = christoffel_numeric(metrics[r], state.coords[r], h, checked);
        accels[r].resize(n);
        for (std::size_t s = 0; s < n; ++s) {
            double force = 0.0;
            for (std::size_t i = 0; i < n; ++i) force += mp.g_inv(s, i) * pe.grad[r][i];
            double geo = 0.0;
            for (std::size_t l = 0; l < n; ++l)
                for (std::size_t j = 0; j < n; ++j)
                    geo += gam.c[s][l][j] * state.vels[r][l] * state.vels[r][j];
            accels[r][s] = -force / masses[r] - geo;
        }
    }
    return accels;
}

/**
 * Residual of the Euler-Lagrange equations d/dt(dL/dxdot_i) = dL/dx_i
 * along a sampled trajectory, with the momentum time derivative taken by
 * central differences over neighboring samples. Returns the max-abs
 * residual per interior sample; small residuals certify a solution.
 */
inline std::vector<double> euler_lagrange_residual(const std::vector<double>& times,
                                                   const std::vector<OracleState>& samples,
                                                   const std::vector<MetricField>& metrics,
                                                   const PotentialField& potential,
                                                   const std::vector<double>& masses,
                                                   double h = kOracleStep) {
    if (samples.size() < 5) throw InvalidInputError("euler_lagrange_residual: need at least 5 samples");
    if (times.size() != samples.size())
        throw InvalidInputError("euler_lagrange_residual: times/samples size mismatch");
    const std::size_t nbody = masses.size();

    // momentum[k][r][i] = m_r sum_l g_il(x_r(t_k)) xdot_l(t_k)
    auto momentum = [&](const OracleState& st) {
        std::vector<std::vector<double>> p(nbody);
        for (std::size_t r = 0; r < nbody; ++r) {
            const std::size_t n = st.coords[r].size();
            const SmallMatrix g = metrics[r](st.coords[r]).g;
            p[r].resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t l = 0; l < n; ++l) acc += g(i, l) * st.vels[r][l];
                p[r][i] = masses[r] * acc;
            }
        }
        return p;
    };

    std::vector<double> residuals;
    residuals.reserve(samples.size() - 2);
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
        const auto pm = momentum(samples[k - 1]);
        const auto pp = momentum(samples[k + 1]);
        const double dt2 = times[k + 1] - times[k - 1];
        const PotentialEval pe = potential(samples[k].coords);
        double worst = 0.0;
        for (std::size_t r = 0; r < nbody; ++r) {
            const std::size_t n = samples[k].coords[r].size();
            std::vector<double> probe = samples[k].coords[r];
            for (std::size_t i = 0; i < n; ++i) {
                // dL/dx_i = 1/2 m_r sum_lj (d_i g_lj) xdot_l xdot_j - dU/dx_i
                const double step = h * std::max(1.0, std::fabs(probe[i]));
                probe[i] = samples[k].coords[r][i] + step;
                const SmallMatrix gp = metrics[r](probe).g;
                probe[i] = samples[k].coords[r][i] - step;
                const SmallMatrix gm = metrics[r](probe).g;
                probe[i] = samples[k].coords[r][i];
                double quad = 0.0;
                for (std::size_t l = 0; l < n; ++l)
                    for (std::size_t j = 0; j < n; ++j)
                        quad += (gp(l, j) - gm(l, j)) / (2.0 * step) * samples[k].vels[r][l] *
                                samples[k].vels[r][j];
                const double dl_dx = 0.5 * masses[r] * quad - pe.grad[r][i];
                const double dp_dt = (pp[r][i] - pm[r][i]) / dt2;
                worst = std::max(worst, std::fabs(dp_dt - dl_dx));
            }
        }
        residuals.push_back(worst);
    }
    return residuals;
}

}  // namespace curvednb
