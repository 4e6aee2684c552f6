#include "fieldext/spectral.hpp"

#include "fieldext/errors.hpp"
#include "fieldext/linalg.hpp"

#include <cmath>
#include <string>

namespace fieldext {

ScalarField SpectralBasis::eigenfunction(int j) const {
    if (j < 0 || j >= size()) throw ContractError("eigenfunction index out of range");
    return ScalarField(grid, phi.col(j));
}

SpectralBasis basis_from_kernel_matrix(const Grid& grid, const KernelParams& params,
                                       const Eigen::MatrixXd& kernel_values, int J) {
    const auto m = static_cast<Eigen::Index>(grid.size());
    if (J < 1 || J > m) {
        throw ConfigError("J must lie in [1, " + std::to_string(m) + "], got " + std::to_string(J));
    }
    if (kernel_values.rows() != m || kernel_values.cols() != m) {
        throw ContractError("kernel matrix does not match the grid");
    }
    const double w = grid.cell_weight();
    const Eigen::MatrixXd op = w * kernel_values;
    const linalg::SymmetricEigen eig = linalg::symmetric_eigen(op);
    const auto order = linalg::leading_indices(eig.values, J, linalg::Ordering::Modulus);

    SpectralBasis basis{grid, params, Eigen::VectorXd(J), Eigen::MatrixXd(m, J)};
    for (int j = 0; j < J; ++j) {
        basis.mu[j] = eig.values[order[static_cast<std::size_t>(j)]];
        basis.phi.col(j) = eig.vectors.col(order[static_cast<std::size_t>(j)]);
    }
    linalg::reorthonormalize_clusters(basis.phi, basis.mu);
    linalg::fix_signs(basis.phi);
    basis.phi /= std::sqrt(w);  // unit Euclidean -> unit quadrature norm

    const Eigen::MatrixXd residual = op * basis.phi - basis.phi * basis.mu.asDiagonal();
    for (int j = 0; j < J; ++j) {
        const double r = std::sqrt(w) * residual.col(j).norm();
        const double rel = basis.mu[j] != 0.0 ? r / std::abs(basis.mu[j]) : r;
        basis.max_residual = std::max(basis.max_residual, rel);
    }
    if (!(basis.max_residual <= 1e-8)) {
        throw SolverError("K12 eigen-residual " + std::to_string(basis.max_residual) +
                              " exceeds 1e-8",
                          basis.max_residual);
    }
    return basis;
}

SpectralBasis eig_k12(const Grid& grid, const KernelParams& params, int J) {
    params.validate();
    if (J < 1 || static_cast<std::size_t>(J) > grid.size()) {
        throw ConfigError("J must lie in [1, " + std::to_string(grid.size()) + "], got " +
                          std::to_string(J));
    }
    const KernelMatrix k = assemble(KernelKind::K12, grid, grid, params);
    return basis_from_kernel_matrix(grid, params, k.entries, J);
}

SpectralBasis truncate(const SpectralBasis& basis, int J) {
    if (J < 0 || J > basis.size()) throw ConfigError("cannot truncate basis to J=" + std::to_string(J));
    SpectralBasis out{basis.grid, basis.params, basis.mu.head(J), basis.phi.leftCols(J)};
    out.max_residual = basis.max_residual;
    return out;
}

Eigen::VectorXd project(const SpectralBasis& basis, const ScalarField& f) {
    require_same_grid(basis.grid, f.grid(), "project");
    return basis.grid.cell_weight() * (basis.phi.transpose() * f.values());
}

}  // namespace fieldext
