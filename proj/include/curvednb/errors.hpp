#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvednb {

namespace detail {

/// %g-format a double for an error message; std::to_string renders
/// values below 1e-6 as 0.000000.
inline std::string error_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A quotient with a vanishing denominator (e.g. ctn at s = 0).
class PoleError : public Error {
public:
    PoleError(const std::string& fn, double s)
        : Error(fn + ": pole at s = " + detail::error_num(s)), s_(s) {}
    double offending_s() const noexcept { return s_; }

private:
    double s_;
};

/// Argument outside the domain of an inverse function or map.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Malformed or inconsistent input data.
class InvalidInputError : public Error {
public:
    explicit InvalidInputError(const std::string& msg) : Error(msg) {}
};

/// Coordinate degeneracy of the geodesic-polar / hyperspherical chart
/// (sn_k(s) or sin(phi) below tolerance). Distinct from physical
/// singularities of the potential.
class ChartSingularityError : public Error {
public:
    explicit ChartSingularityError(const std::string& msg) : Error(msg) {}
};

enum class SingularKind { kCollision, kAntipodal };

/// One offending body pair: a collision (all curvatures) or an antipodal
/// pair (positive curvature only).
struct SingularityReport {
    int i = 0;
    int j = 0;
    SingularKind kind = SingularKind::kCollision;
    double value = 0.0;  // chordal distance q_ij (collision) or 4 - k q_ij^2 (antipodal)
};

/// Configuration inside the singular set of the potential.
class SingularConfigurationError : public Error {
public:
    SingularConfigurationError(const std::string& msg, std::vector<SingularityReport> reports)
        : Error(msg), reports_(std::move(reports)) {}
    explicit SingularConfigurationError(std::vector<SingularityReport> reports)
        : Error(describe(reports)), reports_(std::move(reports)) {}
    const std::vector<SingularityReport>& reports() const noexcept { return reports_; }

private:
    static std::string describe(const std::vector<SingularityReport>& reports) {
        std::string msg = "singular configuration:";
        for (const auto& r : reports)
            msg += " pair (" + std::to_string(r.i) + "," + std::to_string(r.j) + ") " +
                   (r.kind == SingularKind::kCollision ? "collision, q_ij = " : "antipodal, 4 - k q_ij^2 = ") +
                   detail::error_num(r.value) + ";";
        return msg;
    }

    std::vector<SingularityReport> reports_;
};

/// Scenario/config validation failure (CLI exit code 1).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Internal consistency assertion tripped in checked mode.
class CheckedModeError : public Error {
public:
    explicit CheckedModeError(const std::string& msg) : Error(msg) {}
};

}  // namespace curvednb
