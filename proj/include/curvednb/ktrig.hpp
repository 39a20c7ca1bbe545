#pragma once

#include <cmath>
#include <string>

#include "curvednb/errors.hpp"

namespace curvednb {

/// Signed Gaussian curvature selecting the geometry: sphere (k > 0),
/// Euclidean space (k = 0), or hyperbolic sphere (k < 0).
struct Curvature {
    double kappa = 0.0;

    /// Metric signature flag of the ambient space: +1 Euclidean, -1 Minkowski.
    constexpr double sigma() const noexcept { return kappa < 0.0 ? -1.0 : 1.0; }

    constexpr bool flat() const noexcept { return kappa == 0.0; }

    /// |k|^{-1/2}, the sphere/hyperboloid radius. Infinite when flat.
    double radius() const noexcept { return 1.0 / std::sqrt(std::fabs(kappa)); }
};

// Below this value of |k| s^2 the trig kernels switch to truncated Taylor
// series in u = k s^2, which keeps them exact and continuous through k = 0.
inline constexpr double kTrigSeriesThreshold = 1e-6;

// Relative slack tolerated when clamping inverse-function arguments that
// rounding pushed just outside their closed domain.
inline constexpr double kInverseClampTol = 1e-12;

// Divisor magnitude below which tn/ctn report a pole. Floating-point
// evaluation at an analytic pole leaves a residue of order eps, never an
// exact zero, so the guard needs width.
inline constexpr double kPoleTol = 1e-14;

namespace detail {

// sn(s)/s = 1 - u/3! + u^2/5! - u^3/7! + u^4/9!,  u = k s^2
inline double sn_over_s_series(double u) noexcept {
    return 1.0 + u * (-1.0 / 6.0 + u * (1.0 / 120.0 + u * (-1.0 / 5040.0 + u / 362880.0)));
}

// csn(s) = 1 - u/2! + u^2/4! - u^3/6! + u^4/8!
inline double csn_series(double u) noexcept {
    return 1.0 + u * (-0.5 + u * (1.0 / 24.0 + u * (-1.0 / 720.0 + u / 40320.0)));
}

// asn(x)/x = 1 + u/6 + 3u^2/40 + 5u^3/112 + 35u^4/1152,  u = k x^2
// (arcsin series; the hyperbolic branch is the same series with u < 0)
inline double asn_over_x_series(double u) noexcept {
    return 1.0 + u * (1.0 / 6.0 + u * (3.0 / 40.0 + u * (5.0 / 112.0 + u * (35.0 / 1152.0))));
}

}  // namespace detail

/**
 * k-sine: k^{-1/2} sin(k^{1/2} s) for k > 0, s for k = 0,
 * |k|^{-1/2} sinh(|k|^{1/2} s) for k < 0.
 *
 * Total and jointly continuous in (k, s); odd in s by construction.
 */
inline double sn(Curvature k, double s) noexcept {
    const double mag = std::fabs(s);
    const double u = k.kappa * mag * mag;
    double r;
    if (std::fabs(u) < kTrigSeriesThreshold) {
        r = mag * detail::sn_over_s_series(u);
    } else if (k.kappa > 0.0) {
        const double a = std::sqrt(k.kappa);
        r = std::sin(a * mag) / a;
    } else {
        const double a = std::sqrt(-k.kappa);
        r = std::sinh(a * mag) / a;
    }
    return s < 0.0 ? -r : r;
}

/**
 * k-cosine: cos(k^{1/2} s) for k > 0, 1 for k = 0,
 * cosh(|k|^{1/2} s) for k < 0. Even in s.
 */
inline double csn(Curvature k, double s) noexcept {
    const double mag = std::fabs(s);
    const double u = k.kappa * mag * mag;
    if (std::fabs(u) < kTrigSeriesThreshold) return detail::csn_series(u);
    if (k.kappa > 0.0) return std::cos(std::sqrt(k.kappa) * mag);
    return std::cosh(std::sqrt(-k.kappa) * mag);
}

/// k-tangent sn/csn. Throws PoleError where csn vanishes.
inline double tn(Curvature k, double s) {
    const double c = csn(k, s);
    if (std::fabs(c) < kPoleTol) throw PoleError("tn", s);
    return sn(k, s) / c;
}

/// k-cotangent csn/sn. Throws PoleError where sn vanishes (e.g. s = 0).
inline double ctn(Curvature k, double s) {
    const double sv = sn(k, s);
    if (std::fabs(sv) < kPoleTol) throw PoleError("ctn", s);
    return csn(k, s) / sv;
}

/// d/ds sn = csn.
inline double d_sn(Curvature k, double s) noexcept { return csn(k, s); }

/// d/ds csn = -k sn.
inline double d_csn(Curvature k, double s) noexcept { return -k.kappa * sn(k, s); }

/**
 * Inverse of sn (principal branch). For k > 0 the domain is
 * |x| <= k^{-1/2}; nonnegative inputs map to [0, (pi/2) k^{-1/2}].
 * Arguments within a 1e-12 relative margin of the domain edge are
 * clamped; anything further out raises DomainError.
 */
inline double asn(Curvature k, double x) {
    const double mag = std::fabs(x);
    const double u = k.kappa * mag * mag;
    double r;
    if (std::fabs(u) < kTrigSeriesThreshold) {
        r = mag * detail::asn_over_x_series(u);
    } else if (k.kappa > 0.0) {
        const double a = std::sqrt(k.kappa);
        double t = a * mag;
        if (t > 1.0) {
            if (t > 1.0 + kInverseClampTol)
                throw DomainError("asn: |x| = " + std::to_string(mag) +
                                  " exceeds k^{-1/2} = " + std::to_string(1.0 / a));
            t = 1.0;
        }
        r = std::asin(t) / a;
    } else {
        const double a = std::sqrt(-k.kappa);
        r = std::asinh(a * mag) / a;
    }
    return x < 0.0 ? -r : r;
}

/**
 * Inverse of csn (principal branch, s >= 0). For k > 0 the domain is
 * y in [-1, 1] and the result lies in [0, pi k^{-1/2}]; for k < 0 the
 * domain is y >= 1. Undefined for k = 0 (csn_0 is constant).
 */
inline double acsn(Curvature k, double y) {
    if (k.kappa > 0.0) {
        double t = y;
        if (std::fabs(t) > 1.0) {
            if (std::fabs(t) > 1.0 + kInverseClampTol)
                throw DomainError("acsn: argument " + std::to_string(y) + " outside [-1, 1]");
            t = t > 0.0 ? 1.0 : -1.0;
        }
        return std::acos(t) / std::sqrt(k.kappa);
    }
    if (k.kappa < 0.0) {
        double t = y;
        if (t < 1.0) {
            if (t < 1.0 - kInverseClampTol)
                throw DomainError("acsn: argument " + std::to_string(y) + " below 1");
            t = 1.0;
        }
        return std::acosh(t) / std::sqrt(-k.kappa);
    }
    throw DomainError("acsn: csn_0 is constant and has no inverse");
}

}  // namespace curvednb
