#pragma once

#include "fieldext/grid.hpp"
#include "fieldext/kernels.hpp"

#include <Eigen/Core>

namespace fieldext {

/// Leading eigenpairs of the discretised operator f -> K12 *_Q f, i.e. of the
/// matrix w * K12 on the grid. Eigenfunctions are stored as value-vectors
/// (columns of `phi`) normalised in the quadrature L2(Q) norm.
struct SpectralBasis {
    Grid grid;
    KernelParams params;
    Eigen::VectorXd mu;   // |mu_1| >= |mu_2| >= ...
    Eigen::MatrixXd phi;  // M x J

    int size() const { return static_cast<int>(mu.size()); }
    ScalarField eigenfunction(int j) const;
    /// Largest relative eigen-residual ||(w K12) phi_j - mu_j phi_j|| / |mu_j| recorded at build time.
    double max_residual = 0.0;
};

SpectralBasis eig_k12(const Grid& grid, const KernelParams& params, int J);

/// Same pipeline on an arbitrary symmetric kernel-value matrix (weight applied
/// inside). Lets the solver wiring be checked against textbook matrices.
SpectralBasis basis_from_kernel_matrix(const Grid& grid, const KernelParams& params,
                                       const Eigen::MatrixXd& kernel_values, int J);

/// The first J pairs of `basis` (J may be 0 for residual diagnostics).
SpectralBasis truncate(const SpectralBasis& basis, int J);

/// c_j = <f, phi_j> in the quadrature inner product.
Eigen::VectorXd project(const SpectralBasis& basis, const ScalarField& f);

}  // namespace fieldext
