#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "curvednb/convergence_report.hpp"
#include "curvednb/errors.hpp"
#include "curvednb/geometry.hpp"
#include "curvednb/ktrig.hpp"

namespace curvednb {

// Default singularity buffer in chordal units: a pair is flagged when
// q_ij < tol (collision) or, on spheres, 4 - kappa q_ij^2 < tol
// (antipodal).
inline constexpr double kSingularTol = 1e-9;

/// Masses plus chart positions of the N bodies on one manifold.
struct BodySystem {
    ManifoldSpec manifold;
    std::vector<double> masses;
    std::vector<ChartPoint> points;
};

inline void validate_body_system(const BodySystem& sys) {
    validate_manifold(sys.manifold);
    if (sys.masses.size() != sys.points.size())
        throw InvalidInputError("body system: masses and points count mismatch");
    if (sys.masses.empty()) throw InvalidInputError("body system: no bodies");
    for (std::size_t r = 0; r < sys.masses.size(); ++r) {
        if (!(sys.masses[r] > 0.0))
            throw InvalidInputError("body " + std::to_string(r) + ": mass must be > 0, got " +
                                    std::to_string(sys.masses[r]));
        validate_chart_point(sys.manifold, sys.points[r]);
    }
}

/**
 * Squared body-body chord in a form regular through kappa = 0:
 *   q^2 = sn_i^2 + sn_j^2 - 2 sn_i sn_j gamma
 *         + 4 kappa (sn^2(s_i/2) - sn^2(s_j/2))^2.
 * The last term is the signature-weighted last-coordinate difference of
 * the center-origin embedding with the 1/kappa cancellation done
 * algebraically.
 */
inline double chord_squared(const ManifoldSpec& m, const ChartPoint& a, const ChartPoint& b) {
    const Curvature k = m.kappa;
    const double sa = sn(k, a.s);
    const double sb = sn(k, b.s);
    const double ha = sn(k, a.s / 2.0);
    const double hb = sn(k, b.s / 2.0);
    const double g = direction_cosine(m, a, b);
    const double dh = ha * ha - hb * hb;
    const double q2 = sa * sa + sb * sb - 2.0 * sa * sb * g + 4.0 * k.kappa * dh * dh;
    return std::max(0.0, q2);
}

/// All pairs within the singularity buffer: collisions for any kappa,
/// antipodal pairs additionally for kappa > 0.
inline std::vector<SingularityReport> detect_singularities(const BodySystem& sys, double tol = kSingularTol) {
    std::vector<SingularityReport> reports;
    const std::size_t n = sys.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double q2 = chord_squared(sys.manifold, sys.points[i], sys.points[j]);
            const double q = std::sqrt(q2);
            if (q < tol)
                reports.push_back({static_cast<int>(i), static_cast<int>(j), SingularKind::kCollision, q});
            else if (sys.manifold.kappa.kappa > 0.0 && 4.0 - sys.manifold.kappa.kappa * q2 < tol)
                reports.push_back({static_cast<int>(i), static_cast<int>(j), SingularKind::kAntipodal,
                                   4.0 - sys.manifold.kappa.kappa * q2});
        }
    }
    return reports;
}

inline void require_nonsingular(const BodySystem& sys, double tol = kSingularTol) {
    auto reports = detect_singularities(sys, tol);
    if (!reports.empty()) throw SingularConfigurationError(std::move(reports));
}

/**
 * Cotangent potential in its on-manifold chordal form, the primary
 * evaluation path (best conditioned near kappa = 0):
 *   U = -sum_{i<j} m_i m_j (2 - kappa q_ij^2) / (q_ij sqrt(4 - kappa q_ij^2)).
 * Requires kappa != 0.
 */
inline double u_cotangent(const BodySystem& sys) {
    if (sys.manifold.kappa.flat()) throw DomainError("u_cotangent: kappa = 0 (use u_newton)");
    require_nonsingular(sys);
    double u = 0.0;
    const double kap = sys.manifold.kappa.kappa;
    for (std::size_t i = 0; i < sys.points.size(); ++i) {
        for (std::size_t j = i + 1; j < sys.points.size(); ++j) {
            const double q2 = chord_squared(sys.manifold, sys.points[i], sys.points[j]);
            const double q = std::sqrt(q2);
            u -= sys.masses[i] * sys.masses[j] * (2.0 - kap * q2) / (q * std::sqrt(4.0 - kap * q2));
        }
    }
    return u;
}

/// Cotangent potential through geodesic distances: -sum m_i m_j ctn(d_ij).
inline double u_cotangent_geodesic(const BodySystem& sys) {
    if (sys.manifold.kappa.flat()) throw DomainError("u_cotangent_geodesic: kappa = 0 (use u_newton)");
    require_nonsingular(sys);
    double u = 0.0;
    for (std::size_t i = 0; i < sys.points.size(); ++i)
        for (std::size_t j = i + 1; j < sys.points.size(); ++j)
            u -= sys.masses[i] * sys.masses[j] *
                 ctn(sys.manifold.kappa, geodesic_distance(sys.manifold, sys.points[i], sys.points[j]));
    return u;
}

/**
 * Cotangent potential in the ambient form, evaluated from center-origin
 * embeddings with q_i^2 = q_i.q_i and the chordal q_ij:
 *   U = -sum m_i m_j (k q_i^2 + k q_j^2 - k q_ij^2)
 *       / sqrt(2 (k q_i^2 + k q_j^2) q_ij^2 - k (q_i^2 - q_j^2)^2 - k q_ij^4).
 */
inline double u_cotangent_ambient(const BodySystem& sys) {
    if (sys.manifold.kappa.flat()) throw DomainError("u_cotangent_ambient: kappa = 0 (use u_newton)");
    require_nonsingular(sys);
    const double kap = sys.manifold.kappa.kappa;
    std::vector<ExtrinsicPoint> emb;
    emb.reserve(sys.points.size());
    for (const auto& p : sys.points) emb.push_back(chart_to_extrinsic(sys.manifold, p, Frame::kCenterOrigin));
    double u = 0.0;
    for (std::size_t i = 0; i < emb.size(); ++i) {
        for (std::size_t j = i + 1; j < emb.size(); ++j) {
            const double qi2 = signature_dot(emb[i], emb[i]);
            const double qj2 = signature_dot(emb[j], emb[j]);
            const double qij = chordal_distance(emb[i], emb[j]);
            const double qij2 = qij * qij;
            const double num = kap * qi2 + kap * qj2 - kap * qij2;
            const double rad = 2.0 * (kap * qi2 + kap * qj2) * qij2 - kap * (qi2 - qj2) * (qi2 - qj2) -
                               kap * qij2 * qij2;
            if (!(rad > 0.0))
                throw InvalidInputError("u_cotangent_ambient: nonpositive radicand (off-manifold input)");
            u -= sys.masses[i] * sys.masses[j] * num / std::sqrt(rad);
        }
    }
    return u;
}

/// Newtonian potential -sum m_i m_j / d_ij on the kappa = 0 chart.
inline double u_newton(const BodySystem& sys) {
    if (!sys.manifold.kappa.flat()) throw DomainError("u_newton: requires a kappa = 0 chart");
    require_nonsingular(sys);
    double u = 0.0;
    for (std::size_t i = 0; i < sys.points.size(); ++i)
        for (std::size_t j = i + 1; j < sys.points.size(); ++j)
            u -= sys.masses[i] * sys.masses[j] /
                 detail::flat_chart_distance(sys.manifold, sys.points[i], sys.points[j]);
    return u;
}

/// Gravitational potential for any curvature: cotangent when kappa != 0,
/// Newtonian when kappa = 0.
inline double u_gravity(const BodySystem& sys) {
    return sys.manifold.kappa.flat() ? u_newton(sys) : u_cotangent(sys);
}

/// Per-body chart gradient components (theta unused in 2D).
struct ChartGrad {
    double s = 0.0;
    double phi = 0.0;
    double theta = 0.0;
};

/**
 * Analytic chart-space gradient of the gravitational potential. Each
 * pair contributes through dU/dd = m_i m_j / sn^2(d) composed with the
 * distance partials from csn d = kappa sn_i sn_j gamma + csn_i csn_j:
 *   dd/ds_i   = (sn_i csn_j - csn_i sn_j gamma) / sn d
 *   dd/dphi_i = -sn_i sn_j (dgamma/dphi_i) / sn d   (theta alike).
 * The same expressions hold at kappa = 0, where they reduce to the
 * gradient of the flat law-of-cosines distance.
 */
inline std::vector<ChartGrad> grad_chart(const BodySystem& sys) {
    require_nonsingular(sys);
    const Curvature k = sys.manifold.kappa;
    const std::size_t n = sys.points.size();
    std::vector<ChartGrad> grad(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const ChartPoint& a = sys.points[i];
            const ChartPoint& b = sys.points[j];
            const double d = geodesic_distance(sys.manifold, a, b);
            const double snd = sn(k, d);
            if (std::fabs(snd) < kChartSingularTol)
                throw SingularConfigurationError({{static_cast<int>(i), static_cast<int>(j),
                                                   SingularKind::kCollision, snd}});
            const double w = sys.masses[i] * sys.masses[j] / (snd * snd);
            const double sa = sn(k, a.s), ca = csn(k, a.s);
            const double sb = sn(k, b.s), cb = csn(k, b.s);
            const double g = direction_cosine(sys.manifold, a, b);

            grad[i].s += w * (sa * cb - ca * sb * g) / snd;
            grad[j].s += w * (sb * ca - cb * sa * g) / snd;
            if (sys.manifold.dim == 2) {
                const double dg_dphi_i = -std::sin(a.phi - b.phi);
                grad[i].phi += w * (-sa * sb * dg_dphi_i) / snd;
                grad[j].phi += w * (-sa * sb * (-dg_dphi_i)) / snd;
            } else {
                const double cdt = std::cos(a.theta - b.theta);
                const double dg_dphi_i =
                    -std::sin(a.phi) * std::cos(b.phi) + std::cos(a.phi) * std::sin(b.phi) * cdt;
                const double dg_dphi_j =
                    -std::sin(b.phi) * std::cos(a.phi) + std::cos(b.phi) * std::sin(a.phi) * cdt;
                const double dg_dtheta_i = -std::sin(a.phi) * std::sin(b.phi) * std::sin(a.theta - b.theta);
                grad[i].phi += w * (-sa * sb * dg_dphi_i) / snd;
                grad[j].phi += w * (-sa * sb * dg_dphi_j) / snd;
                grad[i].theta += w * (-sa * sb * dg_dtheta_i) / snd;
                grad[j].theta += w * (-sa * sb * (-dg_dtheta_i)) / snd;
            }
        }
    }
    return grad;
}

/**
 * The flat-limit error table |U_kappa - U_0| for a chordal configuration
 * held fixed while kappa runs over the sweep list. Positions map to each
 * manifold via chord_to_geodesic; U_0 is the Newtonian value on the
 * kappa = 0 chart of the same chords.
 */
inline ConvergenceReport potential_continuity(const ChordalConfig& config, const std::vector<double>& masses,
                                              const std::vector<double>& kappas) {
    if (config.bodies.size() != masses.size())
        throw InvalidInputError("potential_continuity: masses and bodies count mismatch");
    BodySystem flat;
    flat.manifold = ManifoldSpec{config.dim, Curvature{0.0}};
    flat.masses = masses;
    for (const auto& b : config.bodies) flat.points.push_back(ChartPoint{b.tau, b.phi, b.theta});
    const double u0 = u_newton(flat);

    std::vector<SweepPoint> pts;
    for (double kap : kappas) {
        if (kap == 0.0) throw InvalidInputError("potential_continuity: kappa list must exclude 0");
        BodySystem sys;
        sys.manifold = ManifoldSpec{config.dim, Curvature{kap}};
        sys.masses = masses;
        try {
            for (const auto& b : config.bodies) sys.points.push_back(chordal_to_chart(sys.manifold.kappa, b));
            pts.push_back({kap, std::fabs(u_cotangent(sys) - u0), false, ""});
        } catch (const Error& e) {
            pts.push_back({kap, 0.0, true, e.what()});
        }
    }
    return make_report(std::move(pts), std::fabs(u0));
}

}  // namespace curvednb
