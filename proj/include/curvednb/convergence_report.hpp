#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "curvednb/errors.hpp"

namespace curvednb {

// Errors at or below 100x machine epsilon sit on the rounding floor and
// are excluded from slope fits.
inline constexpr double kFitFloor = 100.0 * std::numeric_limits<double>::epsilon();

/// One sweep sample: the error norm E(kappa) of a limit experiment.
struct SweepPoint {
    double kappa = 0.0;
    double error = 0.0;
    bool excluded = false;  // early termination or floor contamination
    std::string note;
};

/// Least-squares line through (log|kappa|, log E).
struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS residual of the fit in log space
    int points_used = 0;
};

/// Fit log E against log |kappa| over the non-excluded points with E
/// above the rounding floor. Fewer than two usable points yield a fit
/// with points_used < 2 and zero slope.
inline FitResult fit_loglog(const std::vector<SweepPoint>& pts) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& p : pts) {
        if (p.excluded || !(p.error > kFitFloor)) continue;
        xs.push_back(std::log(std::fabs(p.kappa)));
        ys.push_back(std::log(p.error));
    }
    FitResult f;
    f.points_used = static_cast<int>(xs.size());
    if (f.points_used < 2) return f;
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xm += xs[i];
        ym += ys[i];
    }
    xm /= xs.size();
    ym /= ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ys[i] - ym);
    }
    if (sxx == 0.0) throw InvalidInputError("fit_loglog: all kappa magnitudes equal");
    f.slope = sxy / sxx;
    f.intercept = ym - f.slope * xm;
    double r2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (f.intercept + f.slope * xs[i]);
        r2 += e * e;
    }
    f.residual = std::sqrt(r2 / xs.size());
    return f;
}

/// Error table of one kappa -> 0 experiment with per-sign slope fits.
struct ConvergenceReport {
    std::vector<SweepPoint> points;
    FitResult overall;   // fit over all usable points, both signs pooled
    FitResult positive;  // kappa > 0 subset
    FitResult negative;  // kappa < 0 subset
    double reference = 0.0;  // norm of the kappa = 0 baseline quantity
};

namespace detail {

inline std::vector<SweepPoint> sign_subset(const std::vector<SweepPoint>& pts, int sign) {
    std::vector<SweepPoint> out;
    for (const auto& p : pts)
        if ((sign > 0 && p.kappa > 0.0) || (sign < 0 && p.kappa < 0.0)) out.push_back(p);
    return out;
}

}  // namespace detail

/// Assemble a report from raw sweep points: overall and per-sign fits.
inline ConvergenceReport make_report(std::vector<SweepPoint> pts, double reference = 0.0) {
    ConvergenceReport r;
    r.points = std::move(pts);
    r.overall = fit_loglog(r.points);
    const auto pos = detail::sign_subset(r.points, +1);
    const auto neg = detail::sign_subset(r.points, -1);
    if (!pos.empty()) r.positive = fit_loglog(pos);
    if (!neg.empty()) r.negative = fit_loglog(neg);
    r.reference = reference;
    return r;
}

/**
 * Whether E decreases along the one-sign subsequence ordered by
 * decreasing |kappa|: every step may exceed the previous value by at
 * most the slack fraction, and the last usable point must lie below the
 * first. Points on the rounding floor are skipped.
 */
inline bool monotone_decreasing(const std::vector<SweepPoint>& pts, int sign, double slack = 0.05) {
    auto sub = detail::sign_subset(pts, sign);
    std::sort(sub.begin(), sub.end(),
              [](const SweepPoint& a, const SweepPoint& b) { return std::fabs(a.kappa) > std::fabs(b.kappa); });
    double prev = 0.0;
    double first = 0.0;
    double last = 0.0;
    bool seen = false;
    for (const auto& p : sub) {
        if (p.excluded || !(p.error > kFitFloor)) continue;
        if (seen && p.error > prev * (1.0 + slack)) return false;
        if (!seen) first = p.error;
        last = p.error;
        prev = p.error;
        seen = true;
    }
    return seen && last < first;
}

}  // namespace curvednb
