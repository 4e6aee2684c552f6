#pragma once

#include "fieldext/extrapolator.hpp"
#include "fieldext/forward.hpp"
#include "fieldext/grid.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fieldext {

struct GridDims {
    int n1 = 1;
    int n2 = 1;
    friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// A rectangle of constant magnetisation amplitude * direction.
struct MagnetisedRect {
    Rect region;
    std::array<double, 3> direction{0.0, 0.0, 1.0};
    double amplitude = 1.0;
    friend bool operator==(const MagnetisedRect&, const MagnetisedRect&) = default;
};

struct Scenario {
    Rect q{-1.0, 1.0, -1.0, 1.0};
    double h = 0.25;
    GridDims source_grid{120, 120};  // ground-truth magnetisation sampling
    GridDims meas_grid{40, 40};      // measurement / inversion grid on Q
    Rect eval_rect{-10.0, 10.0, -10.0, 10.0};
    GridDims eval_grid{200, 200};
    int J = 80;
    int N = 80;
    BlockForm block_form = BlockForm::SelfAdjoint;
    LambdaOrder lambda_order = LambdaOrder::Modulus;
    double noise_sigma_rel = 0.0;
    std::uint64_t seed = 0;
    std::vector<MagnetisedRect> magnetisation;

    Grid make_source_grid() const { return Grid(q, source_grid.n1, source_grid.n2); }
    Grid make_meas_grid() const { return Grid(q, meas_grid.n1, meas_grid.n2); }
    Grid make_eval_grid() const { return Grid(eval_rect, eval_grid.n1, eval_grid.n2); }
    KernelParams kernel_params() const { return {h}; }

    /// Throws ConfigError on any violated invariant.
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Four-rectangle, out-of-plane magnetisation on Q = [-1, 1]^2 with J = N = 80.
Scenario scenario_fig1_default();

/// Notes on defaults that are assumptions rather than measured values.
std::vector<std::string> scenario_assumptions(const Scenario& s);

/// Cell-centre sampling of the rectangles on the source grid.
Magnetisation build_magnetisation(const Scenario& s);

nlohmann::json to_json(const Scenario& s);
/// Strict: unknown keys and missing keys are ConfigErrors.
Scenario scenario_from_json(const nlohmann::json& j);

}  // namespace fieldext
