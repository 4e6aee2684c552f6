#pragma once

#include "fieldext/grid.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fieldext::io {

/// `x1,x2,value` header, one row per node in grid order, 17 significant digits.
void write_field_csv(const ScalarField& field, const std::filesystem::path& path);

/// Reads a field CSV. With `expected`, node coordinates are checked against that
/// grid (relative 1e-9 of the spacing) and the field is attached to it;
/// otherwise the uniform grid is inferred from the node coordinates.
ScalarField read_field_csv(const std::filesystem::path& path,
                           const std::optional<Grid>& expected = std::nullopt);

/// `index,<column>` CSV of a vector, 1-based index.
void write_series_csv(const Eigen::VectorXd& values, const std::string& column,
                      const std::filesystem::path& path);

struct HeatmapRange {
    double min = 0.0;
    double max = 0.0;
};

/// 8-bit binary PGM, pixels in grid order (width n2, height n1), linear min-max
/// scaling; a constant field maps to 0. Writes `<path>.json` with the range.
HeatmapRange emit_heatmap(const ScalarField& field, const std::filesystem::path& path);

/// Pixel bytes without the file, for tests.
std::vector<unsigned char> heatmap_pixels(const Eigen::VectorXd& values, HeatmapRange& range);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fieldext::io
