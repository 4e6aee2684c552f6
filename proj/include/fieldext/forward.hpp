#pragma once

// Synthetic B3 data at height h from a planar magnetisation on Q.
//
// Three independent routes to the same field:
//   forward_eq1  -- quadrature of the gradient/height-derivative kernels against (M1, M2, M3)
//   forward_div  -- K12 against div(M1, M2) plus K3 against M3 (integration by parts)
//   fft_oracle   -- Riesz multipliers and pi |k| exp(-2 pi h |k|) on a padded periodic lattice

#include "fieldext/grid.hpp"
#include "fieldext/kernels.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fieldext {

using FieldSample = ScalarField;

struct Magnetisation {
    Grid grid;
    Eigen::VectorXd m1;
    Eigen::VectorXd m2;
    Eigen::VectorXd m3;

    /// Zero magnetisation on `grid`.
    explicit Magnetisation(Grid g);
    Magnetisation(Grid g, Eigen::VectorXd c1, Eigen::VectorXd c2, Eigen::VectorXd c3);

    ScalarField component(int which) const;
};

FieldSample forward_eq1(const Magnetisation& mag, const Grid& targets, const KernelParams& params);

/// div(M1, M2): central differences inside, second-order one-sided on the boundary.
ScalarField divergence_field(const Magnetisation& mag);

FieldSample forward_div(const ScalarField& divergence, const ScalarField& m3, const Grid& targets,
                        const KernelParams& params);

struct FftOptions {
    double pad_factor = 4.0;  // lattice extent per axis relative to the magnetisation grid
};

struct FftOracleResult {
    FieldSample field;
    std::vector<std::string> warnings;
    int lattice_n1 = 0;
    int lattice_n2 = 0;
};

/// The eval grid must share the magnetisation grid spacing and sit on the
/// same lattice (offsets integer multiples of the spacing).
FftOracleResult fft_oracle(const Magnetisation& mag, const Grid& eval_grid,
                           const KernelParams& params, const FftOptions& options = {});

/// i.i.d. N(0, (sigma_rel * max|values|)^2) added to every sample.
FieldSample add_noise(const FieldSample& field, double sigma_rel, std::uint64_t seed);

std::array<double, 3> net_moment(const Magnetisation& mag);

}  // namespace fieldext
