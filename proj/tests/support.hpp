#pragma once

// Smooth test magnetisations with analytic derivatives.

#include "fieldext/forward.hpp"
#include "fieldext/grid.hpp"

#include <cmath>

namespace fieldext::testing {

/// psi(x) = exp(-|x - c|^2 / s^2)
struct Gaussian {
    Point c{0.0, 0.0};
    double s = 0.15;

    double operator()(Point x) const {
        const double d1 = x.x1 - c.x1, d2 = x.x2 - c.x2;
        return std::exp(-(d1 * d1 + d2 * d2) / (s * s));
    }
    double d1(Point x) const { return -2.0 * (x.x1 - c.x1) / (s * s) * (*this)(x); }
    double d2(Point x) const { return -2.0 * (x.x2 - c.x2) / (s * s) * (*this)(x); }
};

/// Curl-type tangential field (d2 psi, -d1 psi, 0): divergence-free.
inline Magnetisation silent_source(const Grid& g, const Gaussian& psi) {
    Magnetisation m(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Point p = g.node(k);
        const auto i = static_cast<Eigen::Index>(k);
        m.m1[i] = psi.d2(p);
        m.m2[i] = -psi.d1(p);
    }
    return m;
}

/// A smooth magnetisation with all three components active.
inline Magnetisation smooth_bump(const Grid& g) {
    const Gaussian a{{0.2, -0.1}, 0.15}, b{{-0.15, 0.2}, 0.15}, c{{0.0, 0.05}, 0.15};
    Magnetisation m(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Point p = g.node(k);
        const auto i = static_cast<Eigen::Index>(k);
        m.m1[i] = a(p);
        m.m2[i] = 0.5 * b(p);
        m.m3[i] = c(p);
    }
    return m;
}

inline double rel_l2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).norm() / b.norm();
}

}  // namespace fieldext::testing
