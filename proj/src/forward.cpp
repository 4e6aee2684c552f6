#include "fieldext/forward.hpp"

#include "fieldext/errors.hpp"
#include "fieldext/parallel.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <random>

namespace fieldext {

Magnetisation::Magnetisation(Grid g)
    : Magnetisation(g, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size())),
                    Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size())),
                    Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()))) {}

Magnetisation::Magnetisation(Grid g, Eigen::VectorXd c1, Eigen::VectorXd c2, Eigen::VectorXd c3)
    : grid(g), m1(std::move(c1)), m2(std::move(c2)), m3(std::move(c3)) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (m1.size() != n || m2.size() != n || m3.size() != n) {
        throw ContractError("magnetisation components do not match the grid size");
    }
}

ScalarField Magnetisation::component(int which) const {
    switch (which) {
        case 1: return ScalarField(grid, m1);
        case 2: return ScalarField(grid, m2);
        case 3: return ScalarField(grid, m3);
        default: throw ContractError("magnetisation component index must be 1, 2 or 3");
    }
}

FieldSample forward_eq1(const Magnetisation& mag, const Grid& targets, const KernelParams& params) {
    params.validate();
    const double w = mag.grid.cell_weight();
    // B3 = -1/2 sum_t w [dx1 p M1 + dx2 p M2 + dh p M3]; the K3 kernel already carries the -1/2.
    const Eigen::VectorXd d1 = -0.5 * w * mag.m1;
    const Eigen::VectorXd d2 = -0.5 * w * mag.m2;
    const Eigen::VectorXd d3 = w * mag.m3;
    const KernelTerm terms[] = {
        {KernelKind::DX1, {d1.data(), static_cast<std::size_t>(d1.size())}},
        {KernelKind::DX2, {d2.data(), static_cast<std::size_t>(d2.size())}},
        {KernelKind::K3, {d3.data(), static_cast<std::size_t>(d3.size())}},
    };
    const auto t = targets.nodes();
    const auto s = mag.grid.nodes();
    return FieldSample(targets, par::apply(terms, t, s, params.h));
}

namespace {

// d/dx along one axis of a row-major (n1 x n2) array; axis 0 is x1 (index i).
double axis_derivative(const Eigen::VectorXd& v, const Grid& g, int i, int j, int axis) {
    const int n = axis == 0 ? g.n1() : g.n2();
    const int k = axis == 0 ? i : j;
    const double step = axis == 0 ? g.dx1() : g.dx2();
    auto at = [&](int kk) {
        return axis == 0 ? v[static_cast<Eigen::Index>(g.index(kk, j))]
                         : v[static_cast<Eigen::Index>(g.index(i, kk))];
    };
    if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * step);
    if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * step);
    return (at(k + 1) - at(k - 1)) / (2.0 * step);
}

}  // namespace

ScalarField divergence_field(const Magnetisation& mag) {
    const Grid& g = mag.grid;
    if (g.n1() < 3 || g.n2() < 3) {
        throw ConfigError("divergence stencil needs at least 3x3 cells");
    }
    Eigen::VectorXd d(static_cast<Eigen::Index>(g.size()));
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j)
            d[static_cast<Eigen::Index>(g.index(i, j))] =
                axis_derivative(mag.m1, g, i, j, 0) + axis_derivative(mag.m2, g, i, j, 1);
    return ScalarField(g, std::move(d));
}

FieldSample forward_div(const ScalarField& divergence, const ScalarField& m3, const Grid& targets,
                        const KernelParams& params) {
    params.validate();
    require_same_grid(divergence.grid(), m3.grid(), "forward_div");
    const double w = m3.grid().cell_weight();
    const Eigen::VectorXd dd = w * divergence.values();
    const Eigen::VectorXd d3 = w * m3.values();
    const KernelTerm terms[] = {
        {KernelKind::K12, {dd.data(), static_cast<std::size_t>(dd.size())}},
        {KernelKind::K3, {d3.data(), static_cast<std::size_t>(d3.size())}},
    };
    const auto t = targets.nodes();
    const auto s = m3.grid().nodes();
    return FieldSample(targets, par::apply(terms, t, s, params.h));
}

namespace {

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

// Offset of x from origin in units of step, if it is an integer (within tolerance).
bool lattice_offset(double x, double origin, double step, long& k) {
    const double q = (x - origin) / step;
    k = std::lround(q);
    return std::abs(q - static_cast<double>(k)) <= 1e-6;
}

// Signed frequency (cycles per unit length) of DFT bin k on a lattice of n points.
double frequency(int k, int n, double step) {
    const int signed_k = k <= n / 2 ? k : k - n;
    return signed_k / (n * step);
}

}  // namespace

FftOracleResult fft_oracle(const Magnetisation& mag, const Grid& eval_grid,
                           const KernelParams& params, const FftOptions& options) {
    params.validate();
    const Grid& g = mag.grid;
    const double s1 = g.dx1(), s2 = g.dx2();
    if (std::abs(eval_grid.dx1() - s1) > 1e-9 * s1 || std::abs(eval_grid.dx2() - s2) > 1e-9 * s2) {
        throw ConfigError("fft_oracle: eval grid spacing differs from the magnetisation grid");
    }
    FftOracleResult result{FieldSample(eval_grid), {}, 0, 0};
    if (options.pad_factor < 4.0) {
        result.warnings.push_back("fft_oracle: pad factor " + std::to_string(options.pad_factor) +
                                  " < 4, periodisation error not suppressed");
    }

    // Lattice: magnetisation grid padded symmetrically, enlarged to cover the eval grid.
    const int pad1 = static_cast<int>(std::ceil((options.pad_factor - 1.0) * g.n1() / 2.0));
    const int pad2 = static_cast<int>(std::ceil((options.pad_factor - 1.0) * g.n2() / 2.0));
    long lo1 = -pad1, hi1 = g.n1() + pad1;  // lattice index range [lo, hi) relative to mag grid
    long lo2 = -pad2, hi2 = g.n2() + pad2;
    long e1 = 0, e2 = 0;
    const Point e0 = eval_grid.node(0, 0);
    const Point m0 = g.node(0, 0);
    if (!lattice_offset(e0.x1, m0.x1, s1, e1) || !lattice_offset(e0.x2, m0.x2, s2, e2)) {
        throw ConfigError("fft_oracle: eval grid nodes are not on the magnetisation lattice");
    }
    lo1 = std::min(lo1, e1 - pad1);
    hi1 = std::max(hi1, e1 + eval_grid.n1() + pad1);
    lo2 = std::min(lo2, e2 - pad2);
    hi2 = std::max(hi2, e2 + eval_grid.n2() + pad2);
    const int n1 = static_cast<int>(hi1 - lo1);
    const int n2 = static_cast<int>(hi2 - lo2);
    result.lattice_n1 = n1;
    result.lattice_n2 = n2;
    const std::size_t total = static_cast<std::size_t>(n1) * n2;
    const int n2c = n2 / 2 + 1;
    const std::size_t spectral = static_cast<std::size_t>(n1) * n2c;

    auto real_buf = std::unique_ptr<double[], decltype(&fftw_free)>(
        static_cast<double*>(fftw_malloc(sizeof(double) * total)), &fftw_free);
    using cplx = std::complex<double>;
    auto spec = [&]() {
        return std::unique_ptr<fftw_complex[], decltype(&fftw_free)>(
            static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * spectral)), &fftw_free);
    };
    auto f1 = spec(), f2 = spec(), f3 = spec();

    auto transform = [&](const Eigen::VectorXd& comp, fftw_complex* out) {
        std::fill(real_buf.get(), real_buf.get() + total, 0.0);
        for (int i = 0; i < g.n1(); ++i)
            for (int j = 0; j < g.n2(); ++j)
                real_buf[static_cast<std::size_t>(i - lo1) * n2 + (j - lo2)] =
                    comp[static_cast<Eigen::Index>(g.index(i, j))];
        FftwPlan plan(fftw_plan_dft_r2c_2d(n1, n2, real_buf.get(), out, FFTW_ESTIMATE));
        fftw_execute(plan.get());
    };
    transform(mag.m1, f1.get());
    transform(mag.m2, f2.get());
    transform(mag.m3, f3.get());

    // Transform convention f^(k) = int f(x) exp(-2 pi i x.k) dx; lattice phases cancel on inversion.
    const double pi = std::numbers::pi;
    const cplx minus_i(0.0, -1.0);
    for (int a = 0; a < n1; ++a) {
        const double k1 = frequency(a, n1, s1);
        for (int b = 0; b < n2c; ++b) {
            const double k2 = b / (n2 * s2);
            const double kk = std::hypot(k1, k2);
            const std::size_t q = static_cast<std::size_t>(a) * n2c + b;
            const cplx m1h(f1[q][0], f1[q][1]);
            const cplx m2h(f2[q][0], f2[q][1]);
            const cplx m3h(f3[q][0], f3[q][1]);
            cplx fm = m3h;
            if (kk > 0.0) fm += minus_i * (k1 / kk) * m1h + minus_i * (k2 / kk) * m2h;
            const cplx bh = pi * kk * std::exp(-2.0 * pi * params.h * kk) * fm;
            f3[q][0] = bh.real();
            f3[q][1] = bh.imag();
        }
    }
    FftwPlan inverse(fftw_plan_dft_c2r_2d(n1, n2, f3.get(), real_buf.get(), FFTW_ESTIMATE));
    fftw_execute(inverse.get());
    const double scale = 1.0 / static_cast<double>(total);

    auto& out = result.field.values();
    for (int i = 0; i < eval_grid.n1(); ++i)
        for (int j = 0; j < eval_grid.n2(); ++j) {
            const std::size_t li = static_cast<std::size_t>(e1 + i - lo1);
            const std::size_t lj = static_cast<std::size_t>(e2 + j - lo2);
            out[static_cast<Eigen::Index>(eval_grid.index(i, j))] = real_buf[li * n2 + lj] * scale;
        }
    return result;
}

FieldSample add_noise(const FieldSample& field, double sigma_rel, std::uint64_t seed) {
    if (!(sigma_rel >= 0.0) || !std::isfinite(sigma_rel)) {
        throw ConfigError("noise level must be non-negative, got " + std::to_string(sigma_rel));
    }
    FieldSample out = field;
    if (sigma_rel == 0.0 || field.values().size() == 0) return out;
    const double sigma = sigma_rel * field.values().cwiseAbs().maxCoeff();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (Eigen::Index k = 0; k < out.values().size(); ++k) out.values()[k] += sigma * dist(rng);
    return out;
}

std::array<double, 3> net_moment(const Magnetisation& mag) {
    const double w = mag.grid.cell_weight();
    return {w * mag.m1.sum(), w * mag.m2.sum(), w * mag.m3.sum()};
}

}  // namespace fieldext
