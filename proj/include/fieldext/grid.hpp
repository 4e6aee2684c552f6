#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace fieldext {

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;

    friend Point operator-(Point a, Point b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend Point operator+(Point a, Point b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend bool operator==(Point, Point) = default;
};

/// Axis-aligned rectangle [x1_min, x1_max] x [x2_min, x2_max].
struct Rect {
    double x1_min = 0.0;
    double x1_max = 0.0;
    double x2_min = 0.0;
    double x2_max = 0.0;

    double width() const { return x1_max - x1_min; }
    double height() const { return x2_max - x2_min; }
    double area() const { return width() * height(); }
    bool contains(Point p) const {
        return p.x1 >= x1_min && p.x1 <= x1_max && p.x2 >= x2_min && p.x2 <= x2_max;
    }
    bool contains(const Rect& r) const {
        return r.x1_min >= x1_min && r.x1_max <= x1_max && r.x2_min >= x2_min &&
               r.x2_max <= x2_max;
    }
    /// Throws ConfigError unless both extents are positive and finite.
    void validate() const;

    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Uniform cell-centred grid on a rectangle. Node (i, j) sits at the centre of
/// cell (i, j); flat index is i * n2 + j (row-major, i along x1).
class Grid {
public:
    Grid(const Rect& rect, int n1, int n2);

    const Rect& rect() const { return rect_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    std::size_t size() const { return static_cast<std::size_t>(n1_) * n2_; }
    double dx1() const { return rect_.width() / n1_; }
    double dx2() const { return rect_.height() / n2_; }
    double cell_weight() const { return dx1() * dx2(); }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n2_ + j; }
    Point node(int i, int j) const {
        return {rect_.x1_min + (i + 0.5) * dx1(), rect_.x2_min + (j + 0.5) * dx2()};
    }
    Point node(std::size_t k) const {
        return node(static_cast<int>(k / n2_), static_cast<int>(k % n2_));
    }
    std::vector<Point> nodes() const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Rect rect_;
    int n1_;
    int n2_;
};

Grid build_grid(const Rect& rect, int n1, int n2);

/// Values of a scalar function sampled at the nodes of a grid.
class ScalarField {
public:
    explicit ScalarField(Grid grid);  // zero-initialised
    ScalarField(Grid grid, Eigen::VectorXd values);

    template <class F>
    static ScalarField sample(const Grid& grid, F&& f) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
        for (std::size_t k = 0; k < grid.size(); ++k) v[static_cast<Eigen::Index>(k)] = f(grid.node(k));
        return ScalarField(grid, std::move(v));
    }

    const Grid& grid() const { return grid_; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::VectorXd& values() { return values_; }
    double operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }

private:
    Grid grid_;
    Eigen::VectorXd values_;
};

/// Quadrature inner product cell_weight * sum f_k g_k over the shared grid.
double inner_product(const ScalarField& f, const ScalarField& g);
double norm(const ScalarField& f);

/// Throws ContractError when the two grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace fieldext
