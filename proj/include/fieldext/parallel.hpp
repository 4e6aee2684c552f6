#pragma once

// Data-parallel inner loops of the library. Every routine in `par` has a
// plain-loop twin in `serial` that evaluates kernels through the pointwise
// functions; the tests hold the two against each other and the benchmark
// target times them.
//
// Each output entry is reduced by a single thread in a fixed source order, so
// results do not depend on the OpenMP thread count.

#include "fieldext/kernels.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace fieldext {

/// One kernel convolved with a per-source density (quadrature weight already folded in).
struct KernelTerm {
    KernelKind kind;
    std::span<const double> density;
};

namespace par {

Eigen::MatrixXd assemble(KernelKind kind, std::span<const Point> targets,
                         std::span<const Point> sources, double h);

/// out[a] = sum over terms, sum over b of kernel(target_a - source_b) * density[b].
Eigen::VectorXd apply(std::span<const KernelTerm> terms, std::span<const Point> targets,
                      std::span<const Point> sources, double h);

int max_threads();

}  // namespace par

namespace serial {

Eigen::MatrixXd assemble(KernelKind kind, std::span<const Point> targets,
                         std::span<const Point> sources, double h);

Eigen::VectorXd apply(std::span<const KernelTerm> terms, std::span<const Point> targets,
                      std::span<const Point> sources, double h);

}  // namespace serial

}  // namespace fieldext
