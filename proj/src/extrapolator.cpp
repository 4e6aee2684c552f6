#include "fieldext/extrapolator.hpp"

#include "fieldext/errors.hpp"
#include "fieldext/linalg.hpp"
#include "fieldext/parallel.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace fieldext {

Eigen::VectorXd AuxOperator::apply(const Eigen::VectorXd& values) const {
    return S * (grid.cell_weight() * values);
}

AuxOperator build_aux(std::shared_ptr<const SpectralBasis> basis, const KernelParams& params) {
    params.validate();
    if (!basis || basis->size() < 1) throw ConfigError("build_aux needs a non-empty basis");
    for (int j = 0; j < basis->size(); ++j) {
        if (!(basis->mu[j] != 0.0) || !std::isfinite(basis->mu[j])) {
            throw ConfigError("eigenvalue mu_" + std::to_string(j + 1) +
                              " is zero; choose a smaller J");
        }
    }
    const Grid& grid = basis->grid;
    const double w = grid.cell_weight();
    const auto m = static_cast<Eigen::Index>(grid.size());
    const int J = basis->size();

    AuxOperator aux{basis, grid, params, assemble(KernelKind::K3, grid, grid, params).entries, {}};

    // Matrix route: S = (w K3 Phi) diag(1/mu) Phi^T.
    const Eigen::MatrixXd c = w * (aux.k3 * basis->phi);  // c(a, j) = <K3(. - x_a), phi_j>
    aux.S = c * basis->mu.cwiseInverse().asDiagonal() * basis->phi.transpose();

    // Direct route: pointwise kernel sums, no assembled matrix.
    const auto nodes = grid.nodes();
    Eigen::MatrixXd c_direct = Eigen::MatrixXd::Zero(m, J);
#pragma omp parallel for schedule(static)
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index t = 0; t < m; ++t) {
            const double kv = k3(nodes[static_cast<std::size_t>(t)] - nodes[static_cast<std::size_t>(a)], params);
            for (int j = 0; j < J; ++j) c_direct(a, j) += w * kv * basis->phi(t, j);
        }
    }
    Eigen::MatrixXd s_direct = Eigen::MatrixXd::Zero(m, m);
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < m; ++b)
        for (Eigen::Index a = 0; a < m; ++a) {
            double acc = 0.0;
            for (int j = 0; j < J; ++j) acc += c_direct(a, j) / basis->mu[j] * basis->phi(b, j);
            s_direct(a, b) = acc;
        }
    const double s_scale = aux.S.cwiseAbs().maxCoeff();
    aux.construction_gap = s_scale > 0.0 ? (aux.S - s_direct).cwiseAbs().maxCoeff() / s_scale : 0.0;

    // S (w K3) must equal (K3 w) S^T.
    const Eigen::MatrixXd left = aux.S * (w * aux.k3);
    const Eigen::MatrixXd right = (aux.k3 * w) * aux.S.transpose();
    const double l_scale = left.cwiseAbs().maxCoeff();
    aux.mixed_symmetry_gap = l_scale > 0.0 ? (left - right).cwiseAbs().maxCoeff() / l_scale : 0.0;
    return aux;
}

std::vector<double> residual_rj(const SpectralBasis& basis, const KernelParams& params,
                                std::span<const Point> probes) {
    params.validate();
    const Grid& grid = basis.grid;
    const double w = grid.cell_weight();
    std::vector<double> out;
    out.reserve(probes.size());
    for (const Point x : probes) {
        if (!grid.rect().contains(x)) {
            throw ConfigError("r_J probe (" + std::to_string(x.x1) + ", " + std::to_string(x.x2) +
                              ") lies outside Q");
        }
        const ScalarField kx = ScalarField::sample(grid, [&](Point t) { return k3(t - x, params); });
        Eigen::VectorXd r = -kx.values();
        if (basis.size() > 0) r += basis.phi * project(basis, kx);
        out.push_back(std::sqrt(w) * r.norm());
    }
    return out;
}

std::string_view to_string(BlockForm form) {
    return form == BlockForm::SelfAdjoint ? "selfadjoint" : "literal";
}

std::string_view to_string(LambdaOrder order) {
    return order == LambdaOrder::Modulus ? "modulus" : "algebraic";
}

BlockForm parse_block_form(std::string_view text) {
    if (text == "selfadjoint") return BlockForm::SelfAdjoint;
    if (text == "literal") return BlockForm::Literal;
    throw ConfigError("block_form must be 'selfadjoint' or 'literal', got '" + std::string(text) + "'");
}

LambdaOrder parse_lambda_order(std::string_view text) {
    if (text == "modulus") return LambdaOrder::Modulus;
    if (text == "algebraic") return LambdaOrder::Algebraic;
    throw ConfigError("lambda_order must be 'modulus' or 'algebraic', got '" + std::string(text) + "'");
}

BlockOperator assemble_block(std::shared_ptr<const AuxOperator> aux, const KernelParams& params,
                             BlockForm form) {
    params.validate();
    if (!aux) throw ContractError("assemble_block: null auxiliary operator");
    const Grid& grid = aux->grid;
    const double w = grid.cell_weight();
    const auto m = static_cast<Eigen::Index>(grid.size());
    const Eigen::MatrixXd k12m = assemble(KernelKind::K12, grid, grid, params).entries;

    BlockOperator block{aux, form, Eigen::MatrixXd(2 * m, 2 * m), 0.0};
    Eigen::MatrixXd& L = block.matrix;
    L.topLeftCorner(m, m) = w * k12m;
    L.topRightCorner(m, m) = w * aux->k3;
    L.bottomLeftCorner(m, m) = form == BlockForm::SelfAdjoint ? w * aux->k3 : w * k12m;
    L.bottomRightCorner(m, m) = w * (aux->S * (aux->k3 * w));

    block.asymmetry = linalg::relative_asymmetry(L);
    block.asymmetry_frobenius = (L - L.transpose()).norm() / L.norm();
    if (form == BlockForm::SelfAdjoint) {
        const double fro = block.asymmetry_frobenius;
        if (!(fro <= 1e-10)) {
            throw SolverError("assembled block operator is not symmetric (relative Frobenius " +
                                  std::to_string(fro) + ")",
                              fro);
        }
        L = 0.5 * (L + L.transpose()).eval();
    }
    return block;
}

BlockSpectrum decompose_block(std::shared_ptr<const BlockOperator> block) {
    if (!block) throw ContractError("decompose_block: null block operator");
    const auto n = block->matrix.rows();
    BlockSpectrum out{block, {}, Eigen::VectorXd::Zero(n), {}};
    if (block->form == BlockForm::SelfAdjoint) {
        auto eig = linalg::symmetric_eigen(block->matrix);
        out.values = std::move(eig.values);
        out.vectors = std::move(eig.vectors);
        return out;
    }
    const auto eig = linalg::general_eigen(block->matrix);
    out.values = eig.values.real();
    out.imag = eig.values.imag();
    out.vectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXcd v = eig.vectors.col(j);
        Eigen::Index k = 0;
        v.cwiseAbs().maxCoeff(&k);
        v *= std::conj(v[k]) / std::abs(v[k]);
        out.vectors.col(j) = v.real().normalized();
    }
    return out;
}

BlockModel select_modes(const BlockSpectrum& spectrum, int N, LambdaOrder order) {
    const auto& aux = spectrum.block->aux;
    const Grid& grid = aux->grid;
    const auto m = static_cast<Eigen::Index>(grid.size());
    if (N < 1 || N > 2 * m) {
        throw ConfigError("N must lie in [1, " + std::to_string(2 * m) + "], got " + std::to_string(N));
    }
    const double w = grid.cell_weight();

    std::vector<Eigen::Index> idx;
    if (order == LambdaOrder::Modulus) {
        const Eigen::VectorXd modulus =
            (spectrum.values.array().square() + spectrum.imag.array().square()).sqrt();
        idx = linalg::leading_indices(modulus, N, linalg::Ordering::Algebraic);
    } else {
        idx = linalg::leading_indices(spectrum.values, N, linalg::Ordering::Algebraic);
    }

    const double largest = spectrum.values.cwiseAbs().maxCoeff();
    Eigen::VectorXd lambda(N);
    Eigen::MatrixXd stacked(2 * m, N);
    for (int n = 0; n < N; ++n) {
        const Eigen::Index k = idx[static_cast<std::size_t>(n)];
        if (std::abs(spectrum.imag[k]) > 1e-8 * std::abs(spectrum.values[k])) {
            throw SolverError("block eigenvalue " + std::to_string(n + 1) + " is complex", spectrum.imag[k]);
        }
        lambda[n] = spectrum.values[k];
        stacked.col(n) = spectrum.vectors.col(k);
    }
    if (std::abs(lambda[N - 1]) < 1e3 * std::numeric_limits<double>::epsilon() * largest) {
        throw ConfigError("|lambda_N| is at rounding level; choose a smaller N");
    }
    if (spectrum.block->form == BlockForm::SelfAdjoint) linalg::reorthonormalize_clusters(stacked, lambda);
    linalg::fix_signs(stacked);
    stacked /= std::sqrt(w);

    BlockModel model{aux, grid, spectrum.block->form, order, lambda,
                     stacked.topRows(m), stacked.bottomRows(m), Eigen::VectorXd(N)};
    const Eigen::MatrixXd r = spectrum.block->matrix * stacked - stacked * lambda.asDiagonal();
    for (int n = 0; n < N; ++n) {
        model.residuals[n] = std::sqrt(w) * r.col(n).norm() / std::abs(lambda[n]);
    }
    const double worst = model.residuals.maxCoeff();
    if (!(worst <= 1e-8)) {
        throw SolverError("block eigen-residual " + std::to_string(worst) + " exceeds 1e-8", worst);
    }
    return model;
}

BlockModel solve_block(std::shared_ptr<const BlockOperator> block, int N, LambdaOrder order) {
    return select_modes(decompose_block(std::move(block)), N, order);
}

Eigen::VectorXd coefficients(const BlockModel& model, const FieldSample& meas) {
    require_same_grid(model.grid, meas.grid(), "coefficients");
    const double w = model.grid.cell_weight();
    const Eigen::VectorXd sb = model.aux->apply(meas.values());
    return w * (model.phi12.transpose() * meas.values()) + w * (model.phi3.transpose() * sb);
}

namespace {

void require_height(const BlockModel& model, const KernelParams& params) {
    params.validate();
    if (model.aux->params.h != params.h) {
        throw ContractError("kernel height differs from the one the model was built with");
    }
}

}  // namespace

double lifted_mode(const BlockModel& model, int n, Point x, const KernelParams& params) {
    require_height(model, params);
    if (n < 0 || n >= model.size()) throw ContractError("lifted_mode: mode index out of range");
    const Grid& g = model.grid;
    double acc = 0.0;
    for (std::size_t t = 0; t < g.size(); ++t) {
        const Point d = x - g.node(t);
        const auto k = static_cast<Eigen::Index>(t);
        acc += k12(d, params) * model.phi12(k, n) + k3(d, params) * model.phi3(k, n);
    }
    return g.cell_weight() * acc / model.lambda[n];
}

double Extrapolant::at(Point x) const {
    const Point p[] = {x};
    const auto nodes = grid.nodes();
    const KernelTerm terms[] = {
        {KernelKind::K12, {density12.data(), static_cast<std::size_t>(density12.size())}},
        {KernelKind::K3, {density3.data(), static_cast<std::size_t>(density3.size())}},
    };
    return serial::apply(terms, p, nodes, params.h)[0];
}

FieldSample Extrapolant::on(const Grid& targets) const {
    const auto t = targets.nodes();
    const auto s = grid.nodes();
    const KernelTerm terms[] = {
        {KernelKind::K12, {density12.data(), static_cast<std::size_t>(density12.size())}},
        {KernelKind::K3, {density3.data(), static_cast<std::size_t>(density3.size())}},
    };
    return FieldSample(targets, par::apply(terms, t, s, params.h));
}

Extrapolant make_extrapolant(const BlockModel& model, const FieldSample& meas,
                             const KernelParams& params) {
    require_height(model, params);
    Eigen::VectorXd b = coefficients(model, meas);
    const Eigen::VectorXd scaled = b.cwiseQuotient(model.lambda);
    const double w = model.grid.cell_weight();
    return {model.grid, params, b, w * (model.phi12 * scaled), w * (model.phi3 * scaled)};
}

Extrapolation extrapolate(const BlockModel& model, const FieldSample& meas, const Grid& targets,
                          const KernelParams& params) {
    Extrapolant e = make_extrapolant(model, meas, params);
    return {e.on(targets), std::move(e.b)};
}

}  // namespace fieldext
