#pragma once

// Double-spectral extrapolation of B3 from Q to the whole plane.
//
//   S(x, t)  = sum_{j<=J} <K3(. - x), phi_j> phi_j(t) / mu_j            (auxiliary operator)
//   L_J      = [ K12 *_Q      K3 *_Q     ]
//              [ K3 *_Q       S_J K3 *_Q ]                               (self-adjoint block)
//   L_J [phi12; phi3] = lambda [phi12; phi3],   ||phi12||^2 + ||phi3||^2 = 1
//   b_n      = <B, phi12_n> + <S_J B, phi3_n>
//   lift_n(x)= (1/lambda_n) int_Q K12(x - t) phi12_n(t) + K3(x - t) phi3_n(t) dt
//   B_ext(x) = sum_{n<=N} b_n lift_n(x)
//
// Operators act on value-vectors on the Q grid as matrix * (w * values).

#include "fieldext/forward.hpp"
#include "fieldext/grid.hpp"
#include "fieldext/kernels.hpp"
#include "fieldext/spectral.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace fieldext {

struct AuxOperator {
    std::shared_ptr<const SpectralBasis> basis;
    Grid grid;
    KernelParams params;
    Eigen::MatrixXd k3;  // K3 kernel values on the Q grid
    Eigen::MatrixXd S;   // S(x_a, t_b)
    /// max |S_matrix_product - S_direct_sum| / max |S|
    double construction_gap = 0.0;
    /// max |S (w K3) - (K3 w) S^T| / max |S (w K3)|
    double mixed_symmetry_gap = 0.0;

    int J() const { return basis->size(); }
    /// (S_J f)(x_a) = sum_b S(x_a, t_b) w f_b
    Eigen::VectorXd apply(const Eigen::VectorXd& values) const;
};

AuxOperator build_aux(std::shared_ptr<const SpectralBasis> basis, const KernelParams& params);

/// ||r_J(., x)|| for each probe x in Q, using all pairs of `basis` (truncate() for smaller J).
std::vector<double> residual_rj(const SpectralBasis& basis, const KernelParams& params,
                                std::span<const Point> probes);

enum class BlockForm { SelfAdjoint, Literal };
enum class LambdaOrder { Modulus, Algebraic };

std::string_view to_string(BlockForm form);
std::string_view to_string(LambdaOrder order);
BlockForm parse_block_form(std::string_view text);
LambdaOrder parse_lambda_order(std::string_view text);

struct BlockOperator {
    std::shared_ptr<const AuxOperator> aux;
    BlockForm form = BlockForm::SelfAdjoint;
    Eigen::MatrixXd matrix;  // 2M x 2M, acts on stacked value-vectors
    /// Relative asymmetry of the assembled matrix before it was symmetrised:
    /// max-entry ratio and Frobenius ratio.
    double asymmetry = 0.0;
    double asymmetry_frobenius = 0.0;
};

/// Throws SolverError when the self-adjoint form is asymmetric beyond 1e-10 (relative Frobenius).
BlockOperator assemble_block(std::shared_ptr<const AuxOperator> aux, const KernelParams& params,
                             BlockForm form = BlockForm::SelfAdjoint);

/// Full eigendecomposition of the block operator, computed once and sliced per N.
struct BlockSpectrum {
    std::shared_ptr<const BlockOperator> block;
    Eigen::VectorXd values;
    Eigen::VectorXd imag;     // non-zero only for the literal (non-symmetric) form
    Eigen::MatrixXd vectors;  // unit Euclidean columns (real part for the literal form)
};

BlockSpectrum decompose_block(std::shared_ptr<const BlockOperator> block);

struct BlockModel {
    std::shared_ptr<const AuxOperator> aux;
    Grid grid;
    BlockForm form = BlockForm::SelfAdjoint;
    LambdaOrder order = LambdaOrder::Modulus;
    Eigen::VectorXd lambda;
    Eigen::MatrixXd phi12;  // M x N
    Eigen::MatrixXd phi3;   // M x N
    Eigen::VectorXd residuals;  // relative eigen-residual per mode

    int size() const { return static_cast<int>(lambda.size()); }
};

BlockModel select_modes(const BlockSpectrum& spectrum, int N, LambdaOrder order = LambdaOrder::Modulus);

BlockModel solve_block(std::shared_ptr<const BlockOperator> block, int N,
                       LambdaOrder order = LambdaOrder::Modulus);

Eigen::VectorXd coefficients(const BlockModel& model, const FieldSample& meas);

/// Lifted mode n (0-based) evaluated at an arbitrary point of the plane.
double lifted_mode(const BlockModel& model, int n, Point x, const KernelParams& params);

/// B_ext as a pair of source densities on Q, ready for evaluation anywhere.
struct Extrapolant {
    Grid grid;
    KernelParams params;
    Eigen::VectorXd b;
    Eigen::VectorXd density12;  // w * sum_n b_n / lambda_n * phi12_n
    Eigen::VectorXd density3;   // w * sum_n b_n / lambda_n * phi3_n

    double at(Point x) const;
    FieldSample on(const Grid& targets) const;
};

Extrapolant make_extrapolant(const BlockModel& model, const FieldSample& meas,
                             const KernelParams& params);

struct Extrapolation {
    FieldSample field;
    Eigen::VectorXd b;
};

Extrapolation extrapolate(const BlockModel& model, const FieldSample& meas, const Grid& targets,
                          const KernelParams& params);

}  // namespace fieldext
