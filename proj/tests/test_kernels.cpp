#include <doctest.h>

#include "fieldext/errors.hpp"
#include "fieldext/kernels.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace fieldext;
using std::numbers::pi;

namespace {

double fd_tolerance(double exact, double scale) { return 1e-6 * std::max(std::abs(exact), 1e-3 * scale); }

// Solid angle of the square [-L, L]^2 seen from height h, over 2 pi.
double square_mass(double L, double h) {
    return 4.0 * std::atan(L * L / (h * std::sqrt(2.0 * L * L + h * h))) / (2.0 * pi);
}

}  // namespace

TEST_CASE("closed-form kernel values") {
    CHECK(poisson_kernel({0, 0}, {1.0}) == doctest::Approx(1.0 / (2.0 * pi)));
    CHECK(poisson_kernel({0, 0}, {0.5}) == doctest::Approx(2.0 / pi));
    CHECK(k12({0, 0}, {0.5}) == doctest::Approx(-1.0 / pi));
    CHECK(k12({0, 0}, {1.0}) == doctest::Approx(-1.0 / (4.0 * pi)));
    CHECK(dh_poisson_kernel({0, 0}, {1.0}) == doctest::Approx(-1.0 / pi));
    CHECK(k3({0, 0}, {1.0}) == doctest::Approx(1.0 / (2.0 * pi)));
    const auto g = grad_poisson_kernel({1.0, 0.0}, {1.0});
    CHECK(g[0] == doctest::Approx(-3.0 / (2.0 * pi * std::pow(2.0, 2.5))));
    CHECK(g[0] == doctest::Approx(-0.0844).epsilon(1e-3));
    CHECK(g[1] == 0.0);
    CHECK(std::abs(k3({std::sqrt(2.0) * 0.3, 0.0}, {0.3})) < 1e-12);
    CHECK(k3({0.1, 0.0}, {0.3}) > 0.0);
    CHECK(k3({1.0, 0.0}, {0.3}) < 0.0);
}

TEST_CASE("derivative kernels match finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    for (double h : {0.05, 0.1, 0.5, 1.0}) {
        const double scale = poisson_kernel({0, 0}, {h}) / h;
        for (int trial = 0; trial < 120; ++trial) {
            const Point x{coord(rng), coord(rng)};
            const double eps = 1e-5 * h;
            const double dh = (poisson_kernel(x, {h + eps}) - poisson_kernel(x, {h - eps})) / (2 * eps);
            const double exact_dh = dh_poisson_kernel(x, {h});
            CHECK(std::abs(dh - exact_dh) <= fd_tolerance(exact_dh, scale));
            const auto grad = grad_poisson_kernel(x, {h});
            const double d1 = (poisson_kernel({x.x1 + eps, x.x2}, {h}) - poisson_kernel({x.x1 - eps, x.x2}, {h})) / (2 * eps);
            const double d2 = (poisson_kernel({x.x1, x.x2 + eps}, {h}) - poisson_kernel({x.x1, x.x2 - eps}, {h})) / (2 * eps);
            CHECK(std::abs(d1 - grad[0]) <= fd_tolerance(grad[0], scale));
            CHECK(std::abs(d2 - grad[1]) <= fd_tolerance(grad[1], scale));
            CHECK(k12(x, {h}) == doctest::Approx(-0.5 * poisson_kernel(x, {h})));
            CHECK(k3(x, {h}) == doctest::Approx(-0.5 * exact_dh));
        }
    }
}

TEST_CASE("Poisson kernel mass over a square matches the solid angle") {
    for (double h : {0.1, 0.5}) {
        const Grid g({-1.0, 1.0, -1.0, 1.0}, 400, 400);
        double sum = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) sum += poisson_kernel(g.node(k), {h});
        CHECK(std::abs(sum * g.cell_weight() - square_mass(1.0, h)) <= 1e-4);
    }
    CHECK(square_mass(1e6, 0.1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("shared kernel sample agrees with the pointwise functions") {
    for (double h : {0.07, 0.25, 2.0}) {
        for (Point x : {Point{0, 0}, Point{0.3, -0.1}, Point{-4.0, 2.5}}) {
            const auto s = sample_kernels(x.x1, x.x2, h);
            for (KernelKind kind : {KernelKind::K12, KernelKind::K3, KernelKind::DX1, KernelKind::DX2})
                CHECK(s.get(kind) == doctest::Approx(evaluate_kernel(kind, x, {h})).epsilon(1e-13));
        }
    }
}

TEST_CASE("invalid heights are rejected") {
    CHECK_THROWS_AS(KernelParams{0.0}.validate(), ConfigError);
    CHECK_THROWS_AS(KernelParams{-1.0}.validate(), ConfigError);
    CHECK_THROWS_AS(KernelParams{INFINITY}.validate(), ConfigError);
    const Grid g({0, 1, 0, 1}, 2, 2);
    CHECK_THROWS_AS(assemble(KernelKind::K12, g, g, {0.0}), ConfigError);
}

TEST_CASE("assembled matrices have the expected symmetry and sign") {
    const Grid g({-1.0, 1.0, -1.0, 1.0}, 8, 8);
    const KernelParams p{0.2};
    const auto a = assemble(KernelKind::K12, g, g, p);
    CHECK((a.entries - a.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.entries.maxCoeff() < 0.0);
    const auto b = assemble(KernelKind::K3, g, g, p);
    CHECK((b.entries - b.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const auto d = assemble(KernelKind::DX1, g, g, p);
    CHECK((d.entries + d.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-15 * d.entries.cwiseAbs().maxCoeff());
    CHECK(a.entries(3, 5) == doctest::Approx(k12(g.node(3) - g.node(5), p)));

    const Grid t({2.0, 3.0, 0.0, 1.0}, 3, 5);
    const auto r = assemble(KernelKind::K3, t, g, p);
    CHECK(r.entries.rows() == 15);
    CHECK(r.entries.cols() == 64);
    CHECK(r.entries(7, 11) == doctest::Approx(k3(t.node(7) - g.node(11), p)));
}

TEST_CASE("assembly refuses matrices above the entry cap") {
    const Grid g({0, 1, 0, 1}, 10, 10);
    CHECK_THROWS_AS(assemble(KernelKind::K12, g, g, {0.1}, 9999), ConfigError);
    CHECK_NOTHROW(assemble(KernelKind::K12, g, g, {0.1}, 10000));
}

TEST_CASE("binary dump round trip and layout") {
    Eigen::MatrixXd m(2, 3);
    m << 1, 2, 3, 4, 5, 6.5;
    const auto path = std::filesystem::temp_directory_path() / "fieldext_kernel_dump.bin";
    write_binary(m, path);
    CHECK(std::filesystem::file_size(path) == 16 + 6 * 8);
    std::ifstream in(path, std::ios::binary);
    std::uint64_t rows = 0, cols = 0;
    double second = 0.0;
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    in.read(reinterpret_cast<char*>(&second), 8);
    in.read(reinterpret_cast<char*>(&second), 8);
    CHECK(rows == 2);
    CHECK(cols == 3);
    CHECK(second == 2.0);
    CHECK(read_binary(path) == m);
    std::filesystem::remove(path);
}
