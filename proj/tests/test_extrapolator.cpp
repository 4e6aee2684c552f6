#include <doctest.h>

#include "fieldext/errors.hpp"
#include "fieldext/extrapolator.hpp"
#include "support.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

using namespace fieldext;

namespace {

const Rect kQ{-1.0, 1.0, -1.0, 1.0};

struct Pipeline {
    std::shared_ptr<const SpectralBasis> basis;
    std::shared_ptr<const AuxOperator> aux;
    std::shared_ptr<const BlockOperator> block;
};

Pipeline build(const Grid& g, const KernelParams& p, int J, BlockForm form = BlockForm::SelfAdjoint) {
    Pipeline out;
    out.basis = std::make_shared<const SpectralBasis>(eig_k12(g, p, J));
    out.aux = std::make_shared<const AuxOperator>(build_aux(out.basis, p));
    out.block = std::make_shared<const BlockOperator>(assemble_block(out.aux, p, form));
    return out;
}

FieldSample smooth_measurement(const Grid& g, const KernelParams& p) {
    return forward_eq1(testing::smooth_bump(Grid(kQ, 48, 48)), g, p);
}

}  // namespace

TEST_CASE("single-cell auxiliary operator and block") {
    // w = 1, phi = 1, mu = k12(0) = -1/(4 pi h^2), k3(0) = 1/(2 pi h^3): S = k3(0) / mu = -2/h.
    const Grid g({-0.5, 0.5, -0.5, 0.5}, 1, 1);
    const KernelParams p{1.0};
    const auto pl = build(g, p, 1);
    CHECK(pl.aux->S(0, 0) == doctest::Approx(-2.0));

    // The lower-right entry equals k3^2 / k12, so the 2x2 block is singular and its
    // only non-zero eigenvalue is the trace.
    const double a = -1.0 / (4.0 * std::numbers::pi);
    const double b = 1.0 / (2.0 * std::numbers::pi);
    CHECK(pl.block->matrix(1, 1) == doctest::Approx(b * b / a));
    const auto model = solve_block(pl.block, 1);
    CHECK(model.lambda[0] == doctest::Approx(a + b * b / a));
    CHECK(model.phi12(0, 0) == doctest::Approx(a / std::sqrt(a * a + b * b)).epsilon(1e-12));
    CHECK_THROWS_AS(solve_block(pl.block, 2), ConfigError);
}

TEST_CASE("auxiliary operator: both constructions and the mixed symmetry") {
    const Grid g(kQ, 16, 16);
    const KernelParams p{0.1};
    const auto pl = build(g, p, 20);
    CHECK(pl.aux->J() == 20);
    CHECK(pl.aux->construction_gap <= 1e-12);
    CHECK(pl.aux->mixed_symmetry_gap <= 1e-12);

    const double w = g.cell_weight();
    for (int k : {0, 5, 19}) {
        const Eigen::VectorXd lhs = pl.aux->apply(pl.basis->phi.col(k));
        const Eigen::VectorXd rhs = w * (pl.aux->k3 * pl.basis->phi.col(k)) / pl.basis->mu[k];
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * rhs.cwiseAbs().maxCoeff());
    }
    // Functions orthogonal to the basis are annihilated.
    const auto full = eig_k12(g, p, 21);
    CHECK(pl.aux->apply(full.phi.col(20)).cwiseAbs().maxCoeff() <= 1e-10 * pl.aux->S.cwiseAbs().maxCoeff());
}

TEST_CASE("build_aux rejects degenerate input") {
    const Grid g({0, 2, 0, 1}, 2, 1);
    Eigen::MatrixXd k(2, 2);
    k << 1, 1, 1, 1;
    const auto b = std::make_shared<const SpectralBasis>(basis_from_kernel_matrix(g, {0.3}, k, 2));
    CHECK_THROWS_AS(build_aux(b, {0.3}), ConfigError);
    CHECK_THROWS_AS(build_aux(nullptr, {0.3}), ConfigError);
}

TEST_CASE("r_J residual") {
    const KernelParams p{0.1};
    const Grid small(kQ, 8, 8);
    const auto full = eig_k12(small, p, 64);
    const std::vector<Point> probes{{0.0, 0.0}, {0.5, -0.5}, {-0.9, 0.9}};
    const auto r0 = residual_rj(truncate(full, 0), p, probes);
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto kx = ScalarField::sample(small, [&](Point t) { return k3(t - probes[i], p); });
        CHECK(r0[i] == doctest::Approx(norm(kx)));
    }
    const auto rf = residual_rj(full, p, probes);
    for (std::size_t i = 0; i < probes.size(); ++i) CHECK(rf[i] <= 1e-8 * r0[i]);

    const Grid g(kQ, 32, 32);
    const auto b = eig_k12(g, p, 40);
    const std::vector<Point> centre{{0.0, 0.0}, {0.5, 0.5}};
    std::vector<double> prev;
    for (int J : {10, 20, 30, 40}) {
        const auto r = residual_rj(truncate(b, J), p, centre);
        if (!prev.empty())
            for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] <= prev[i]);
        prev = r;
    }
    const std::vector<Point> outside{{1.5, 0.0}};
    CHECK_THROWS_AS(residual_rj(b, p, outside), ConfigError);
}

TEST_CASE("block operator structure") {
    const Grid g(kQ, 10, 10);
    const KernelParams p{0.2};
    const auto pl = build(g, p, 25);
    const auto m = static_cast<Eigen::Index>(g.size());
    CHECK(pl.block->matrix.rows() == 2 * m);
    CHECK(pl.block->asymmetry <= 1e-12);
    CHECK(pl.block->asymmetry_frobenius <= 1e-12);
    const double w = g.cell_weight();
    for (int j : {0, 3, 24}) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * m);
        x.head(m) = pl.basis->phi.col(j);
        const Eigen::VectorXd y = pl.block->matrix * x;
        CHECK((y.head(m) - pl.basis->mu[j] * pl.basis->phi.col(j)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((y.tail(m) - w * pl.aux->k3 * pl.basis->phi.col(j)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const auto lit = build(g, p, 25, BlockForm::Literal);
    CHECK(lit.block->asymmetry > 1e-3);
}

TEST_CASE("leading block mode against power iteration") {
    // A non-square grid keeps the leading eigenvalue simple.
    const Grid g({-1.0, 1.0, -1.0, 0.75}, 8, 7);
    const KernelParams p{0.2};
    const auto pl = build(g, p, 10);
    const auto model = solve_block(pl.block, 1);
    const Eigen::MatrixXd& L = pl.block->matrix;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(L.rows());
    for (auto& x : v) x = normal(rng);
    v.normalize();
    double rq = 0.0;
    for (int it = 0; it < 100000; ++it) {
        v = (L * v).normalized();
        const double next = v.dot(L * v);
        if (std::abs(next - rq) <= 1e-15 * std::abs(next)) break;
        rq = next;
    }
    CHECK(std::abs(model.lambda[0] - rq) <= 1e-6 * std::abs(rq));
    const double w = g.cell_weight();
    Eigen::VectorXd stacked(L.rows());
    stacked << model.phi12.col(0), model.phi3.col(0);
    CHECK(std::abs(std::sqrt(w) * stacked.dot(v)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("block modes are normalised and accurate") {
    const Grid g(kQ, 10, 10);
    const KernelParams p{0.2};
    const auto pl = build(g, p, 30);
    const auto model = solve_block(pl.block, 30);
    const double w = g.cell_weight();
    for (int n = 0; n < 30; ++n) {
        const double nrm = w * (model.phi12.col(n).squaredNorm() + model.phi3.col(n).squaredNorm());
        CHECK(nrm == doctest::Approx(1.0).epsilon(1e-12));
        if (n > 0) CHECK(std::abs(model.lambda[n]) <= std::abs(model.lambda[n - 1]));
    }
    CHECK(model.residuals.maxCoeff() <= 1e-8);
    const Eigen::MatrixXd gram = w * (model.phi12.transpose() * model.phi12 + model.phi3.transpose() * model.phi3);
    CHECK((gram - Eigen::MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff() <= 1e-10);

    const auto alg = solve_block(pl.block, 10, LambdaOrder::Algebraic);
    for (int n = 1; n < 10; ++n) CHECK(alg.lambda[n] <= alg.lambda[n - 1]);
    CHECK_THROWS_AS(solve_block(pl.block, 0), ConfigError);
    CHECK_THROWS_AS(solve_block(pl.block, 201), ConfigError);
}

TEST_CASE("rank-deficient block refuses rounding-level modes") {
    // With J = M the lower-right block equals K3 K12^-1 K3, so half the spectrum vanishes.
    const Grid g(kQ, 6, 6);
    const KernelParams p{0.3};
    const auto pl = build(g, p, 36);
    CHECK_NOTHROW(solve_block(pl.block, 36));
    CHECK_THROWS_AS(solve_block(pl.block, 72), ConfigError);
}

TEST_CASE("coefficients, lifted modes and the extrapolant") {
    const Grid g(kQ, 12, 12);
    const KernelParams p{0.25};
    const auto pl = build(g, p, 30);
    const auto model = solve_block(pl.block, 30);
    const auto meas = smooth_measurement(g, p);

    CHECK(coefficients(model, FieldSample(g)).isZero(0.0));
    const FieldSample other(g, meas.values().cwiseAbs());
    const Eigen::VectorXd lin = coefficients(model, FieldSample(g, 2.0 * meas.values() - other.values()));
    const Eigen::VectorXd ref = 2.0 * coefficients(model, meas) - coefficients(model, other);
    CHECK((lin - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());

    // On the grid the lifted mode reproduces the first component of the block eigenvector.
    for (int n : {0, 7, 29})
        for (std::size_t k : {std::size_t{0}, std::size_t{50}, std::size_t{143}})
            CHECK(lifted_mode(model, n, g.node(k), p) ==
                  doctest::Approx(model.phi12(static_cast<Eigen::Index>(k), n)).scale(1e-3));
    const double on_q = model.phi12.col(0).cwiseAbs().maxCoeff();
    CHECK(std::abs(lifted_mode(model, 0, {50.0, 0.0}, p)) < 1e-4 * on_q);
    CHECK(std::abs(lifted_mode(model, 0, {0.0, -50.0}, p)) < 1e-4 * on_q);

    const auto ext = make_extrapolant(model, meas, p);
    const Grid targets({-4.0, 4.0, -4.0, 4.0}, 7, 7);
    const auto field = ext.on(targets);
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const Point x = targets.node(k);
        double sum = 0.0;
        for (int n = 0; n < model.size(); ++n) sum += ext.b[n] * lifted_mode(model, n, x, p);
        CHECK(field[k] == doctest::Approx(sum).epsilon(1e-10).scale(1e-12));
        CHECK(ext.at(x) == doctest::Approx(field[k]).epsilon(1e-12).scale(1e-14));
    }
    const auto full = extrapolate(model, meas, targets, p);
    CHECK(full.field.values() == field.values());
    CHECK(full.b == ext.b);

    CHECK_THROWS_AS(make_extrapolant(model, meas, {0.3}), ContractError);
    CHECK_THROWS_AS(lifted_mode(model, 30, {0, 0}, p), ContractError);
    CHECK_THROWS_AS(coefficients(model, FieldSample(Grid(kQ, 12, 13))), ContractError);
}

TEST_CASE("whole pipeline is linear in the data") {
    const Grid g(kQ, 12, 12);
    const KernelParams p{0.25};
    const auto pl = build(g, p, 30);
    const auto model = solve_block(pl.block, 20);
    const auto a = smooth_measurement(g, p);
    const FieldSample b = ScalarField::sample(g, [](Point x) { return std::sin(x.x1) * x.x2; });
    const Grid targets({-3.0, 3.0, -3.0, 3.0}, 9, 9);
    const auto ea = extrapolate(model, a, targets, p).field.values();
    const auto eb = extrapolate(model, b, targets, p).field.values();
    const auto ec = extrapolate(model, FieldSample(g, 0.5 * a.values() + 3.0 * b.values()), targets, p).field.values();
    const Eigen::VectorXd ref = 0.5 * ea + 3.0 * eb;
    CHECK((ec - ref).cwiseAbs().maxCoeff() <= 1e-10 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("literal block form runs end to end") {
    const Grid g(kQ, 8, 8);
    const KernelParams p{0.25};
    const auto pl = build(g, p, 16, BlockForm::Literal);
    const auto spectrum = decompose_block(pl.block);
    const auto model = select_modes(spectrum, 8);
    CHECK(model.form == BlockForm::Literal);
    CHECK(model.residuals.maxCoeff() <= 1e-8);
    const auto meas = smooth_measurement(g, p);
    const auto e = extrapolate(model, meas, Grid({-2, 2, -2, 2}, 5, 5), p);
    CHECK(e.field.values().allFinite());
}

TEST_CASE("flag parsing") {
    CHECK(parse_block_form("selfadjoint") == BlockForm::SelfAdjoint);
    CHECK(parse_block_form("literal") == BlockForm::Literal);
    CHECK(parse_lambda_order("modulus") == LambdaOrder::Modulus);
    CHECK(parse_lambda_order("algebraic") == LambdaOrder::Algebraic);
    CHECK_THROWS_AS(parse_block_form("symmetric"), ConfigError);
    CHECK_THROWS_AS(parse_lambda_order(""), ConfigError);
    CHECK(to_string(BlockForm::Literal) == "literal");
    CHECK(to_string(LambdaOrder::Modulus) == "modulus");
}
