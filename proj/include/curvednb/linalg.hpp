#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "curvednb/errors.hpp"

namespace curvednb {

/// Dense row-major square matrix of order n <= 4; sized for per-body
/// metric blocks and ambient coordinates, not general linear algebra.
class SmallMatrix {
  public:
    explicit SmallMatrix(std::size_t n) : n_(n) {
        if (n == 0 || n > 4) throw InvalidInputError("SmallMatrix: order must be 1..4");
    }

    std::size_t order() const noexcept { return n_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }

    static SmallMatrix identity(std::size_t n) {
        SmallMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

  private:
    std::size_t n_;
    std::array<double, 16> a_{};
};

/// Gauss-Jordan inverse with partial pivoting. Throws InvalidInputError
/// when a pivot falls below 1e-14 times the largest entry (singular).
inline SmallMatrix inverse(SmallMatrix m) {
    const std::size_t n = m.order();
    SmallMatrix inv = SmallMatrix::identity(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(m(i, j)));
    if (scale == 0.0) throw InvalidInputError("inverse: zero matrix");

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(m(r, col)) > std::fabs(m(piv, col))) piv = r;
        if (std::fabs(m(piv, col)) < 1e-14 * scale)
            throw InvalidInputError("inverse: singular matrix (pivot " + std::to_string(col) + ")");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(piv, j), m(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        const double d = 1.0 / m(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            m(col, j) *= d;
            inv(col, j) *= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = m(r, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                m(r, j) -= f * m(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

/// Max absolute entry of G*Ginv - I, the residual of an inverse pair.
inline double inverse_residual(const SmallMatrix& g, const SmallMatrix& ginv) {
    const std::size_t n = g.order();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < n; ++l) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += g(i, j) * ginv(j, l);
            worst = std::max(worst, std::fabs(acc - (i == l ? 1.0 : 0.0)));
        }
    }
    return worst;
}

}  // namespace curvednb
