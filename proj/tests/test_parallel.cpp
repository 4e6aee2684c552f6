#include <doctest.h>

#include "fieldext/parallel.hpp"

#include <omp.h>

#include <random>
#include <vector>

using namespace fieldext;

namespace {

std::vector<Point> random_points(std::size_t n, double half, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-half, half);
    std::vector<Point> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    return pts;
}

std::vector<double> random_density(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> d(n);
    for (auto& v : d) v = g(rng);
    return d;
}

}  // namespace

TEST_CASE("parallel assembly matches the serial reference") {
    const auto targets = random_points(70, 3.0, 1);
    const auto sources = random_points(90, 1.0, 2);
    for (KernelKind kind : {KernelKind::K12, KernelKind::K3, KernelKind::DX1, KernelKind::DX2}) {
        const auto a = par::assemble(kind, targets, sources, 0.15);
        const auto b = serial::assemble(kind, targets, sources, 0.15);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * b.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("parallel apply matches the serial reference") {
    const auto targets = random_points(150, 4.0, 3);
    const auto sources = random_points(200, 1.0, 4);
    const auto d1 = random_density(200, 5), d2 = random_density(200, 6), d3 = random_density(200, 7);
    const std::vector<KernelTerm> terms{{KernelKind::DX1, d1}, {KernelKind::DX2, d2}, {KernelKind::K3, d3}};
    const auto a = par::apply(terms, targets, sources, 0.2);
    const auto b = serial::apply(terms, targets, sources, 0.2);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * b.cwiseAbs().maxCoeff());

    const std::vector<KernelTerm> k12{{KernelKind::K12, d1}};
    const auto m = serial::assemble(KernelKind::K12, targets, sources, 0.2);
    const Eigen::Map<const Eigen::VectorXd> dv(d1.data(), 200);
    const Eigen::VectorXd ref = m * dv;
    CHECK((par::apply(k12, targets, sources, 0.2) - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("results do not depend on the thread count") {
    const auto targets = random_points(64, 2.0, 8);
    const auto sources = random_points(100, 1.0, 9);
    const auto d = random_density(100, 10);
    const std::vector<KernelTerm> terms{{KernelKind::K3, d}, {KernelKind::K12, d}};
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto a1 = par::apply(terms, targets, sources, 0.3);
    const auto m1 = par::assemble(KernelKind::DX2, targets, sources, 0.3);
    omp_set_num_threads(4);
    const auto a4 = par::apply(terms, targets, sources, 0.3);
    const auto m4 = par::assemble(KernelKind::DX2, targets, sources, 0.3);
    omp_set_num_threads(saved);
    CHECK(a1 == a4);
    CHECK(m1 == m4);
    CHECK(par::max_threads() >= 1);
}

TEST_CASE("empty inputs give empty or zero outputs") {
    const std::vector<Point> none;
    const auto targets = random_points(5, 1.0, 12);
    const std::vector<double> empty_density;
    const std::vector<KernelTerm> terms{{KernelKind::K12, empty_density}};
    const auto v = par::apply(terms, targets, none, 0.1);
    CHECK(v.size() == 5);
    CHECK(v.isZero(0.0));
    CHECK(par::assemble(KernelKind::K12, none, targets, 0.1).rows() == 0);
}
