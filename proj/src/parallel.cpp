#include "fieldext/parallel.hpp"

#include <omp.h>

namespace fieldext {

namespace par {

Eigen::MatrixXd assemble(KernelKind kind, std::span<const Point> targets,
                         std::span<const Point> sources, double h) {
    const auto nt = static_cast<Eigen::Index>(targets.size());
    const auto ns = static_cast<Eigen::Index>(sources.size());
    Eigen::MatrixXd m(nt, ns);
    // Column-major storage: one source per column keeps writes contiguous.
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < ns; ++b) {
        const Point s = sources[static_cast<std::size_t>(b)];
        for (Eigen::Index a = 0; a < nt; ++a) {
            const Point t = targets[static_cast<std::size_t>(a)];
            m(a, b) = sample_kernels(t.x1 - s.x1, t.x2 - s.x2, h).get(kind);
        }
    }
    return m;
}

Eigen::VectorXd apply(std::span<const KernelTerm> terms, std::span<const Point> targets,
                      std::span<const Point> sources, double h) {
    const auto nt = static_cast<Eigen::Index>(targets.size());
    const std::size_t ns = sources.size();
    Eigen::VectorXd out(nt);
#pragma omp parallel for schedule(static)
    for (Eigen::Index a = 0; a < nt; ++a) {
        const Point t = targets[static_cast<std::size_t>(a)];
        double acc = 0.0;
        for (std::size_t b = 0; b < ns; ++b) {
            const KernelSample k = sample_kernels(t.x1 - sources[b].x1, t.x2 - sources[b].x2, h);
            for (const KernelTerm& term : terms) acc += k.get(term.kind) * term.density[b];
        }
        out[a] = acc;
    }
    return out;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace par

namespace serial {

Eigen::MatrixXd assemble(KernelKind kind, std::span<const Point> targets,
                         std::span<const Point> sources, double h) {
    const KernelParams params{h};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(targets.size()),
                      static_cast<Eigen::Index>(sources.size()));
    for (std::size_t a = 0; a < targets.size(); ++a)
        for (std::size_t b = 0; b < sources.size(); ++b)
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                evaluate_kernel(kind, targets[a] - sources[b], params);
    return m;
}

Eigen::VectorXd apply(std::span<const KernelTerm> terms, std::span<const Point> targets,
                      std::span<const Point> sources, double h) {
    const KernelParams params{h};
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(targets.size()));
    for (std::size_t a = 0; a < targets.size(); ++a) {
        for (const KernelTerm& term : terms) {
            for (std::size_t b = 0; b < sources.size(); ++b) {
                out[static_cast<Eigen::Index>(a)] +=
                    evaluate_kernel(term.kind, targets[a] - sources[b], params) * term.density[b];
            }
        }
    }
    return out;
}

}  // namespace serial

}  // namespace fieldext
