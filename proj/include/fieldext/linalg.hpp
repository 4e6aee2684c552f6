#pragma once

// Dense eigensolvers plus the selection conventions shared by
// the K12 basis and the block model.

#include <Eigen/Core>

#include <complex>
#include <vector>

namespace fieldext::linalg {

struct SymmetricEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Full decomposition of a symmetric matrix (only the lower triangle is read).
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a);

struct GeneralEigen {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;  // right eigenvectors, unit 2-norm columns
};

GeneralEigen general_eigen(const Eigen::MatrixXd& a);

enum class Ordering { Modulus, Algebraic };

/// Indices of the `count` leading eigenvalues. Modulus: |v| descending, ties by
/// descending value then lower index. Algebraic: value descending, ties by lower index.
std::vector<Eigen::Index> leading_indices(const Eigen::VectorXd& values, Eigen::Index count,
                                          Ordering order);

/// Flip each column so its entry of largest magnitude (first one on ties) is positive.
void fix_signs(Eigen::MatrixXd& columns);

/// Modified Gram-Schmidt inside runs of columns whose eigenvalues have relative
/// gap below `rel_gap`. Columns must be ordered like `values`.
void reorthonormalize_clusters(Eigen::MatrixXd& columns, const Eigen::VectorXd& values,
                               double rel_gap = 1e-10);

/// max |A - A^T| / max |A|
double relative_asymmetry(const Eigen::MatrixXd& a);

}  // namespace fieldext::linalg
