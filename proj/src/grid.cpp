#include "fieldext/grid.hpp"

#include "fieldext/errors.hpp"

#include <cmath>
#include <string>

namespace fieldext {

void Rect::validate() const {
    const bool finite = std::isfinite(x1_min) && std::isfinite(x1_max) &&
                        std::isfinite(x2_min) && std::isfinite(x2_max);
    if (!finite || !(x1_min < x1_max) || !(x2_min < x2_max)) {
        throw ConfigError("degenerate rectangle [" + std::to_string(x1_min) + ", " +
                          std::to_string(x1_max) + "] x [" + std::to_string(x2_min) + ", " +
                          std::to_string(x2_max) + "]");
    }
}

Grid::Grid(const Rect& rect, int n1, int n2) : rect_(rect), n1_(n1), n2_(n2) {
    rect_.validate();
    if (n1 < 1 || n2 < 1) {
        throw ConfigError("grid cell counts must be positive, got " + std::to_string(n1) + "x" +
                          std::to_string(n2));
    }
}

std::vector<Point> Grid::nodes() const {
    std::vector<Point> out;
    out.reserve(size());
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j) out.push_back(node(i, j));
    return out;
}

Grid build_grid(const Rect& rect, int n1, int n2) { return Grid(rect, n1, n2); }

ScalarField::ScalarField(Grid grid)
    : grid_(grid), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()))) {}

ScalarField::ScalarField(Grid grid, Eigen::VectorXd values)
    : grid_(grid), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
        throw ContractError("field has " + std::to_string(values_.size()) + " values but grid has " +
                            std::to_string(grid_.size()) + " nodes");
    }
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw ContractError(std::string(what) + ": grid mismatch");
}

double inner_product(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.grid(), g.grid(), "inner_product");
    return f.grid().cell_weight() * f.values().dot(g.values());
}

double norm(const ScalarField& f) { return std::sqrt(inner_product(f, f)); }

}  // namespace fieldext
