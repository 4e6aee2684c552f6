#pragma once

// Poisson kernel of the upper half-space and the operator kernels built from it.
//
//   p_h(x)        = h / (2 pi (|x|^2 + h^2)^(3/2))
//   d/dh p_h(x)   = (|x|^2 - 2 h^2) / (2 pi (|x|^2 + h^2)^(5/2))
//   grad p_h(x)   = -3 h x / (2 pi (|x|^2 + h^2)^(5/2))
//   K12           = -p_h / 2
//   K3            = -(d/dh p_h) / 2
//
// Matrices hold pointwise kernel values only; the quadrature weight of the
// source grid is applied by the caller.

#include "fieldext/grid.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <numbers>
#include <string_view>

namespace fieldext {

struct KernelParams {
    double h = 1.0;

    /// Throws ConfigError unless h is positive and finite.
    void validate() const;
};

double poisson_kernel(Point x, const KernelParams& params);
double dh_poisson_kernel(Point x, const KernelParams& params);
std::array<double, 2> grad_poisson_kernel(Point x, const KernelParams& params);
double k12(Point x, const KernelParams& params);
double k3(Point x, const KernelParams& params);

enum class KernelKind { K12, K3, DX1, DX2 };

std::string_view to_string(KernelKind kind);
double evaluate_kernel(KernelKind kind, Point x, const KernelParams& params);

/// All four kernels at one offset, sharing the radial powers. Used by the
/// OpenMP loops; the pointwise functions above are the reference.
struct KernelSample {
    double k12;
    double k3;
    double dx1;
    double dx2;

    double get(KernelKind kind) const {
        switch (kind) {
            case KernelKind::K12: return k12;
            case KernelKind::K3: return k3;
            case KernelKind::DX1: return dx1;
            case KernelKind::DX2: return dx2;
        }
        return 0.0;
    }
};

inline KernelSample sample_kernels(double d1, double d2, double h) {
    constexpr double inv_2pi = 0.5 / std::numbers::pi;
    const double r2 = d1 * d1 + d2 * d2;
    const double s = r2 + h * h;
    const double inv3 = 1.0 / (s * std::sqrt(s));
    const double inv5 = inv3 / s;
    return {
        -0.5 * h * inv_2pi * inv3,
        -0.5 * (r2 - 2.0 * h * h) * inv_2pi * inv5,
        -3.0 * h * d1 * inv_2pi * inv5,
        -3.0 * h * d2 * inv_2pi * inv5,
    };
}

/// Default refusal threshold for dense assembly (entries, not bytes).
inline constexpr std::size_t kDefaultMaxEntries = std::size_t{64} * 1024 * 1024;

struct KernelMatrix {
    Grid targets;
    Grid sources;
    KernelKind kind;
    Eigen::MatrixXd entries;  // entries(a, b) = kernel(target_a - source_b)
};

/// Dense kernel matrix between two grids; throws ConfigError above max_entries.
KernelMatrix assemble(KernelKind kind, const Grid& targets, const Grid& sources,
                      const KernelParams& params,
                      std::size_t max_entries = kDefaultMaxEntries);

/// Raw dump: two little-endian uint64 (rows, cols) then rows*cols float64, row-major.
void write_binary(const Eigen::MatrixXd& m, const std::filesystem::path& path);
Eigen::MatrixXd read_binary(const std::filesystem::path& path);

}  // namespace fieldext
