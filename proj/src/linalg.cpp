#include "fieldext/linalg.hpp"

#include "fieldext/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fieldext::linalg {

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw ContractError("symmetric_eigen: matrix is not square");
    if (a.rows() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw SolverError("symmetric eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

GeneralEigen general_eigen(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw ContractError("general_eigen: matrix is not square");
    if (a.rows() == 0) return {};
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, true);
    if (solver.info() != Eigen::Success) {
        throw SolverError("general eigensolver did not converge");
    }
    GeneralEigen out{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) out.vectors.col(j).normalize();
    return out;
}

std::vector<Eigen::Index> leading_indices(const Eigen::VectorXd& values, Eigen::Index count,
                                          Ordering order) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    auto before = [&](Eigen::Index a, Eigen::Index b) {
        const double va = values[a], vb = values[b];
        if (order == Ordering::Modulus && std::abs(va) != std::abs(vb))
            return std::abs(va) > std::abs(vb);
        if (va != vb) return va > vb;
        return a < b;
    };
    std::sort(idx.begin(), idx.end(), before);
    idx.resize(static_cast<std::size_t>(std::clamp<Eigen::Index>(count, 0, values.size())));
    return idx;
}

void fix_signs(Eigen::MatrixXd& columns) {
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
        Eigen::Index k = 0;
        columns.col(j).cwiseAbs().maxCoeff(&k);
        if (columns(k, j) < 0.0) columns.col(j) = -columns.col(j);
    }
}

void reorthonormalize_clusters(Eigen::MatrixXd& columns, const Eigen::VectorXd& values,
                               double rel_gap) {
    const Eigen::Index n = columns.cols();
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n) {
            const double scale = std::max(std::abs(values[end - 1]), std::abs(values[end]));
            if (std::abs(values[end] - values[end - 1]) > rel_gap * scale) break;
            ++end;
        }
        if (end - start > 1) {
            for (Eigen::Index j = start; j < end; ++j) {
                for (Eigen::Index i = start; i < j; ++i)
                    columns.col(j) -= columns.col(i).dot(columns.col(j)) * columns.col(i);
                columns.col(j).normalize();
            }
        }
        start = end;
    }
}

double relative_asymmetry(const Eigen::MatrixXd& a) {
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace fieldext::linalg
