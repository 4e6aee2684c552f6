#include "fieldext/kernels.hpp"

#include "fieldext/errors.hpp"
#include "fieldext/parallel.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace fieldext {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double radial_sq(Point x) { return x.x1 * x.x1 + x.x2 * x.x2; }

}  // namespace

void KernelParams::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw ConfigError("measurement height h must be positive, got " + std::to_string(h));
    }
}

double poisson_kernel(Point x, const KernelParams& params) {
    const double h = params.h;
    return h / (kTwoPi * std::pow(radial_sq(x) + h * h, 1.5));
}

double dh_poisson_kernel(Point x, const KernelParams& params) {
    const double h = params.h;
    const double r2 = radial_sq(x);
    return (r2 - 2.0 * h * h) / (kTwoPi * std::pow(r2 + h * h, 2.5));
}

std::array<double, 2> grad_poisson_kernel(Point x, const KernelParams& params) {
    const double h = params.h;
    const double c = -3.0 * h / (kTwoPi * std::pow(radial_sq(x) + h * h, 2.5));
    return {c * x.x1, c * x.x2};
}

double k12(Point x, const KernelParams& params) { return -0.5 * poisson_kernel(x, params); }

double k3(Point x, const KernelParams& params) { return -0.5 * dh_poisson_kernel(x, params); }

std::string_view to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::K12: return "K12";
        case KernelKind::K3: return "K3";
        case KernelKind::DX1: return "DX1";
        case KernelKind::DX2: return "DX2";
    }
    return "?";
}

double evaluate_kernel(KernelKind kind, Point x, const KernelParams& params) {
    switch (kind) {
        case KernelKind::K12: return k12(x, params);
        case KernelKind::K3: return k3(x, params);
        case KernelKind::DX1: return grad_poisson_kernel(x, params)[0];
        case KernelKind::DX2: return grad_poisson_kernel(x, params)[1];
    }
    return 0.0;
}

KernelMatrix assemble(KernelKind kind, const Grid& targets, const Grid& sources,
                      const KernelParams& params, std::size_t max_entries) {
    params.validate();
    const std::size_t entries = targets.size() * sources.size();
    if (entries > max_entries) {
        throw ConfigError("refusing to assemble " + std::to_string(targets.size()) + "x" +
                          std::to_string(sources.size()) + " kernel matrix (cap " +
                          std::to_string(max_entries) + " entries)");
    }
    const auto t = targets.nodes();
    const auto s = sources.nodes();
    return {targets, sources, kind, par::assemble(kind, t, s, params.h)};
}

void write_binary(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
    static_assert(std::endian::native == std::endian::little, "little-endian host expected");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.rows()),
                                   static_cast<std::uint64_t>(m.cols())};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Eigen::MatrixXd read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::uint64_t dims[2] = {0, 0};
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!in) throw std::runtime_error("truncated header in " + path.string());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
    std::vector<double> row(dims[1]);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in) throw std::runtime_error("truncated payload in " + path.string());
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
    return m;
}

}  // namespace fieldext
