#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "curvednb/errors.hpp"
#include "curvednb/ktrig.hpp"
#include "curvednb/linalg.hpp"

namespace curvednb {

// Chart coordinates closer than this to a degeneracy (sn s = 0, and
// sin phi = 0 in 3D) count as singular; dynamics turns the violation
// into an integration event.
inline constexpr double kChartSingularTol = 1e-10;

/// A sphere (kappa > 0), plane (kappa = 0), or hyperbolic sphere
/// (kappa < 0) of dimension 2 or 3.
struct ManifoldSpec {
    int dim = 2;
    Curvature kappa{};
};

inline void validate_manifold(const ManifoldSpec& m) {
    if (m.dim != 2 && m.dim != 3)
        throw InvalidInputError("manifold dim must be 2 or 3, got " + std::to_string(m.dim));
    if (!std::isfinite(m.kappa.kappa)) throw InvalidInputError("kappa must be finite");
}

/// Geodesic polar (2D) or hyperspherical (3D) coordinates of one body:
/// radial distance s from the pole and angles phi [, theta].
struct ChartPoint {
    double s = 0.0;
    double phi = 0.0;
    double theta = 0.0;  // used only when dim = 3
};

/// Range check for a chart point: s >= 0, s within the antipodal bound
/// pi*kappa^{-1/2} for kappa > 0, and phi in [0, pi] when dim = 3.
inline void validate_chart_point(const ManifoldSpec& m, const ChartPoint& p) {
    if (!(p.s >= 0.0)) throw InvalidInputError("chart point: s must be >= 0, got " + std::to_string(p.s));
    if (m.kappa.kappa > 0.0) {
        const double smax = M_PI * m.kappa.radius();
        if (p.s > smax * (1.0 + 1e-12))
            throw InvalidInputError("chart point: s = " + std::to_string(p.s) +
                                    " exceeds antipodal bound " + std::to_string(smax));
    }
    if (m.dim == 3 && (p.phi < 0.0 || p.phi > M_PI))
        throw InvalidInputError("chart point: phi must lie in [0, pi], got " + std::to_string(p.phi));
}

inline bool chart_regular(const ManifoldSpec& m, const ChartPoint& p) noexcept {
    if (std::fabs(sn(m.kappa, p.s)) < kChartSingularTol) return false;
    if (m.dim == 3 && std::fabs(std::sin(p.phi)) < kChartSingularTol) return false;
    return true;
}

inline void require_chart_regular(const ManifoldSpec& m, const ChartPoint& p) {
    if (std::fabs(sn(m.kappa, p.s)) < kChartSingularTol) {
        // sn vanishes at the chart pole and, for kappa > 0, again at its
        // antipode; name whichever locus this arc is closer to.
        const bool antipode = m.kappa.kappa > 0.0 && p.s > 0.5 * M_PI * m.kappa.radius();
        char buf[96];
        std::snprintf(buf, sizeof buf, "chart %s: |sn_k(s)| below %g at s = %g",
                      antipode ? "antipode" : "pole", kChartSingularTol, p.s);
        throw ChartSingularityError(buf);
    }
    if (m.dim == 3 && std::fabs(std::sin(p.phi)) < kChartSingularTol) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "polar axis: |sin(phi)| below %g at phi = %g",
                      kChartSingularTol, p.phi);
        throw ChartSingularityError(buf);
    }
}

/// Ambient coordinates (x,y,z[,w]) with the metric signature flag of the
/// embedding space: sigma = +1 Euclidean, -1 Minkowski (last coordinate).
struct ExtrinsicPoint {
    std::array<double, 4> coords{};
    int ncoords = 3;  // dim + 1
    double sigma = 1.0;
};

/// Ambient frame: pole-shifted puts the common pole at the origin (the
/// frame of the flat limit); center-origin puts the sphere center there
/// (the frame of the dot-product distance formula).
enum class Frame { kPoleShifted, kCenterOrigin };

/// Embedding of a chart point for kappa != 0. The last coordinate is
/// |k|^{-1/2} csn s, minus |k|^{-1/2} in the pole-shifted frame.
inline ExtrinsicPoint chart_to_extrinsic(const ManifoldSpec& m, const ChartPoint& p, Frame frame) {
    if (m.kappa.flat())
        throw DomainError("chart_to_extrinsic: kappa = 0 has no curved embedding; use chart_to_extrinsic_flat");
    const double sv = sn(m.kappa, p.s);
    const double last = m.kappa.radius() * (csn(m.kappa, p.s) - (frame == Frame::kPoleShifted ? 1.0 : 0.0));
    ExtrinsicPoint e;
    e.ncoords = m.dim + 1;
    e.sigma = m.kappa.sigma();
    if (m.dim == 2) {
        e.coords = {sv * std::cos(p.phi), sv * std::sin(p.phi), last, 0.0};
    } else {
        e.coords = {sv * std::sin(p.phi) * std::sin(p.theta), sv * std::sin(p.phi) * std::cos(p.theta),
                    sv * std::cos(p.phi), last};
    }
    return e;
}

/// The kappa = 0 branch: plain polar/spherical conversion with the last
/// extrinsic coordinate identically zero (both frames coincide).
inline ExtrinsicPoint chart_to_extrinsic_flat(const ManifoldSpec& m, const ChartPoint& p) {
    if (!m.kappa.flat()) throw DomainError("chart_to_extrinsic_flat requires kappa = 0");
    ExtrinsicPoint e;
    e.ncoords = m.dim + 1;
    e.sigma = 1.0;
    if (m.dim == 2) {
        e.coords = {p.s * std::cos(p.phi), p.s * std::sin(p.phi), 0.0, 0.0};
    } else {
        e.coords = {p.s * std::sin(p.phi) * std::sin(p.theta), p.s * std::sin(p.phi) * std::cos(p.theta),
                    p.s * std::cos(p.phi), 0.0};
    }
    return e;
}

/// Frame-dispatching embedding that is total in kappa.
inline ExtrinsicPoint embed(const ManifoldSpec& m, const ChartPoint& p, Frame frame) {
    return m.kappa.flat() ? chart_to_extrinsic_flat(m, p) : chart_to_extrinsic(m, p, frame);
}

/// Signature dot product a.b with sigma weighting the last coordinate.
inline double signature_dot(const ExtrinsicPoint& a, const ExtrinsicPoint& b) {
    if (a.ncoords != b.ncoords || a.sigma != b.sigma)
        throw InvalidInputError("signature_dot: mixed ambient spaces");
    double acc = 0.0;
    for (int i = 0; i + 1 < a.ncoords; ++i) acc += a.coords[i] * b.coords[i];
    return acc + a.sigma * a.coords[a.ncoords - 1] * b.coords[a.ncoords - 1];
}

/// Euclidean (sigma = +1) or Minkowski (sigma = -1) distance between two
/// ambient points of the same frame. For on-manifold inputs the radicand
/// is a squared chord and cannot be negative beyond rounding.
inline double chordal_distance(const ExtrinsicPoint& a, const ExtrinsicPoint& b) {
    if (a.ncoords != b.ncoords || a.sigma != b.sigma)
        throw InvalidInputError("chordal_distance: mixed ambient spaces");
    double acc = 0.0;
    double scale = 0.0;
    for (int i = 0; i < a.ncoords; ++i) {
        const double d = a.coords[i] - b.coords[i];
        const double w = (i + 1 == a.ncoords) ? a.sigma : 1.0;
        acc += w * d * d;
        scale += d * d;
    }
    if (acc < 0.0) {
        if (acc < -1e-12 * std::max(1.0, scale))
            throw InvalidInputError("chordal_distance: negative radicand (off-manifold input)");
        acc = 0.0;
    }
    return std::sqrt(acc);
}

/// Relative residual of the center-origin constraint
/// x^2 + y^2 (+ z^2) + sigma * last^2 = 1/kappa.
inline double on_manifold_residual(const ManifoldSpec& m, const ExtrinsicPoint& center_origin) {
    const double q2 = signature_dot(center_origin, center_origin);
    return std::fabs(q2 - 1.0 / m.kappa.kappa) * std::fabs(m.kappa.kappa);
}

/// cos of the angle between the two chart directions as seen from the
/// pole: cos(phi_a - phi_b) in 2D, the spherical law-of-cosines factor
/// cos phi_a cos phi_b + sin phi_a sin phi_b cos(theta_a - theta_b) in 3D.
inline double direction_cosine(const ManifoldSpec& m, const ChartPoint& a, const ChartPoint& b) {
    if (m.dim == 2) return std::cos(a.phi - b.phi);
    return std::cos(a.phi) * std::cos(b.phi) +
           std::sin(a.phi) * std::sin(b.phi) * std::cos(a.theta - b.theta);
}

namespace detail {

inline double flat_chart_distance(const ManifoldSpec& m, const ChartPoint& a, const ChartPoint& b) {
    const double g = direction_cosine(m, a, b);
    const double d2 = a.s * a.s + b.s * b.s - 2.0 * a.s * b.s * g;
    return std::sqrt(std::max(0.0, d2));
}

}  // namespace detail

/**
 * Geodesic distance between two chart points, computed from the
 * center-origin embedding dot product: d = csn^{-1}(kappa a.b). The
 * kappa = 0 branch is the planar/spherical law of cosines in the same
 * chart, so callers never special-case the flat manifold.
 */
inline double geodesic_distance(const ManifoldSpec& m, const ChartPoint& a, const ChartPoint& b) {
    if (m.kappa.flat()) return detail::flat_chart_distance(m, a, b);
    const ExtrinsicPoint ea = chart_to_extrinsic(m, a, Frame::kCenterOrigin);
    const ExtrinsicPoint eb = chart_to_extrinsic(m, b, Frame::kCenterOrigin);
    return acsn(m.kappa, m.kappa.kappa * signature_dot(ea, eb));
}

/// Geodesic distance through the chart-level identity
/// csn d = kappa sn(s_a) sn(s_b) gamma + csn(s_a) csn(s_b),
/// an algebraically equal alternative to the embedding path.
inline double geodesic_distance_chart(const ManifoldSpec& m, const ChartPoint& a, const ChartPoint& b) {
    if (m.kappa.flat()) return detail::flat_chart_distance(m, a, b);
    const double g = direction_cosine(m, a, b);
    const double y = m.kappa.kappa * sn(m.kappa, a.s) * sn(m.kappa, b.s) * g +
                     csn(m.kappa, a.s) * csn(m.kappa, b.s);
    return acsn(m.kappa, y);
}

/// Geodesic arc subtending a given pole chord: s = 2 sn^{-1}(tau/2).
inline double chord_to_geodesic(Curvature k, double tau) { return 2.0 * asn(k, tau / 2.0); }

/// Pole chord subtended by a geodesic arc: tau = 2 sn(s/2).
inline double geodesic_to_chord(Curvature k, double s) { return 2.0 * sn(k, s / 2.0); }

/// One body given by its ambient (chordal) distance from the pole plus
/// the chart angles; the representation the flat limit holds fixed.
struct ChordalBody {
    double tau = 0.0;
    double phi = 0.0;
    double theta = 0.0;  // used only when dim = 3
};

/// A full configuration in chordal representation.
struct ChordalConfig {
    int dim = 2;
    std::vector<ChordalBody> bodies;
};

inline void validate_chordal_body(Curvature k, const ChordalBody& b) {
    if (!(b.tau >= 0.0)) throw InvalidInputError("chordal body: tau must be >= 0, got " + std::to_string(b.tau));
    if (k.kappa > 0.0) {
        const double tmax = 2.0 * k.radius();
        if (b.tau > tmax * (1.0 + 1e-12))
            throw InvalidInputError("chordal body: tau = " + std::to_string(b.tau) +
                                    " exceeds diameter " + std::to_string(tmax));
    }
}

/// Chart point of a chordal body on the manifold of curvature k.
inline ChartPoint chordal_to_chart(Curvature k, const ChordalBody& b) {
    validate_chordal_body(k, b);
    return ChartPoint{chord_to_geodesic(k, b.tau), b.phi, b.theta};
}

/// Metric tensor and its inverse at a chart point:
/// diag(1, sn^2 s) in 2D, diag(1, sn^2 s, sn^2 s sin^2 phi) in 3D.
struct MetricPair {
    SmallMatrix g;
    SmallMatrix g_inv;
};

inline MetricPair metric(const ManifoldSpec& m, const ChartPoint& p) {
    require_chart_regular(m, p);
    const double sn2 = sn(m.kappa, p.s) * sn(m.kappa, p.s);
    MetricPair mp{SmallMatrix(static_cast<std::size_t>(m.dim)), SmallMatrix(static_cast<std::size_t>(m.dim))};
    mp.g(0, 0) = 1.0;
    mp.g_inv(0, 0) = 1.0;
    mp.g(1, 1) = sn2;
    mp.g_inv(1, 1) = 1.0 / sn2;
    if (m.dim == 3) {
        const double sp2 = std::sin(p.phi) * std::sin(p.phi);
        mp.g(2, 2) = sn2 * sp2;
        mp.g_inv(2, 2) = 1.0 / (sn2 * sp2);
    }
    return mp;
}

/// Christoffel symbols Gamma^s_{lj}, indexed (upper, lower, lower) in the
/// coordinate order (s, phi[, theta]); entries beyond dim are zero.
struct ChristoffelTable {
    int dim = 2;
    double c[3][3][3] = {};

    double operator()(int s, int l, int j) const noexcept { return c[s][l][j]; }
};

/// Closed-form Christoffel table of the geodesic polar/hyperspherical
/// chart. 2D: Gamma^s_pp = -sn csn, Gamma^p_sp = ctn s. 3D adds
/// Gamma^s_tt = -sn csn sin^2 phi, Gamma^p_tt = -sin phi cos phi,
/// Gamma^t_st = ctn s, Gamma^t_pt = cot phi.
inline ChristoffelTable christoffel_closed(const ManifoldSpec& m, const ChartPoint& p) {
    require_chart_regular(m, p);
    ChristoffelTable t;
    t.dim = m.dim;
    const double snv = sn(m.kappa, p.s);
    const double csnv = csn(m.kappa, p.s);
    const double ctnv = csnv / snv;
    t.c[0][1][1] = -snv * csnv;
    t.c[1][0][1] = t.c[1][1][0] = ctnv;
    if (m.dim == 3) {
        const double sp = std::sin(p.phi);
        const double cp = std::cos(p.phi);
        t.c[0][2][2] = -snv * csnv * sp * sp;
        t.c[1][2][2] = -sp * cp;
        t.c[2][0][2] = t.c[2][2][0] = ctnv;
        t.c[2][1][2] = t.c[2][2][1] = cp / sp;
    }
    return t;
}

}  // namespace curvednb
