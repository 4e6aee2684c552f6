#include "fieldext/io.hpp"

#include "fieldext/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fieldext::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_field_csv(const ScalarField& field, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "x1,x2,value\n";
    const Grid& g = field.grid();
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Point p = g.node(k);
        out << fmt17(p.x1) << ',' << fmt17(p.x2) << ',' << fmt17(field[k]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ScalarField read_field_csv(const std::filesystem::path& path, const std::optional<Grid>& expected) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("x1,x2,value", 0) != 0) {
        throw ConfigError(path.string() + ": expected header 'x1,x2,value'");
    }
    std::vector<Point> nodes;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
            throw ConfigError(path.string() + ": malformed row '" + line + "'");
        }
        nodes.push_back({std::stod(a), std::stod(b)});
        values.push_back(std::stod(c));
    }
    if (nodes.empty()) throw ConfigError(path.string() + ": no data rows");

    std::optional<Grid> grid = expected;
    if (!grid) {
        std::size_t n2 = 1;
        while (n2 < nodes.size() && nodes[n2].x1 == nodes[0].x1) ++n2;
        if (nodes.size() % n2 != 0) throw ConfigError(path.string() + ": rows do not form a grid");
        const std::size_t n1 = nodes.size() / n2;
        const double d1 = n1 > 1 ? nodes[n2].x1 - nodes[0].x1 : 0.0;
        const double d2 = n2 > 1 ? nodes[1].x2 - nodes[0].x2 : 0.0;
        if ((n1 > 1 && !(d1 > 0)) || (n2 > 1 && !(d2 > 0)) || (n1 == 1 && n2 == 1)) {
            throw ConfigError(path.string() + ": cannot infer grid spacing");
        }
        // A single row/column has no spacing information; borrow the other axis.
        const double s1 = n1 > 1 ? d1 : d2;
        const double s2 = n2 > 1 ? d2 : d1;
        grid = Grid({nodes[0].x1 - s1 / 2, nodes[0].x1 + (static_cast<double>(n1) - 0.5) * s1,
                     nodes[0].x2 - s2 / 2, nodes[0].x2 + (static_cast<double>(n2) - 0.5) * s2},
                    static_cast<int>(n1), static_cast<int>(n2));
    }
    if (grid->size() != nodes.size()) {
        throw ConfigError(path.string() + ": " + std::to_string(nodes.size()) + " rows, grid has " +
                          std::to_string(grid->size()) + " nodes");
    }
    const double tol = 1e-9 * std::max(grid->dx1(), grid->dx2());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Point p = grid->node(k);
        if (std::abs(p.x1 - nodes[k].x1) > tol || std::abs(p.x2 - nodes[k].x2) > tol) {
            throw ConfigError(path.string() + ": node " + std::to_string(k) +
                              " does not match the grid");
        }
    }
    return ScalarField(*grid, Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                                static_cast<Eigen::Index>(values.size())));
}

void write_series_csv(const Eigen::VectorXd& values, const std::string& column,
                      const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "index," << column << '\n';
    for (Eigen::Index k = 0; k < values.size(); ++k) out << k + 1 << ',' << fmt17(values[k]) << '\n';
}

std::vector<unsigned char> heatmap_pixels(const Eigen::VectorXd& values, HeatmapRange& range) {
    std::vector<unsigned char> px(static_cast<std::size_t>(values.size()), 0);
    if (values.size() == 0) return px;
    range = {values.minCoeff(), values.maxCoeff()};
    const double span = range.max - range.min;
    if (!(span > 0.0)) return px;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const double t = (values[k] - range.min) / span;
        px[static_cast<std::size_t>(k)] = static_cast<unsigned char>(std::lround(255.0 * t));
    }
    return px;
}

HeatmapRange emit_heatmap(const ScalarField& field, const std::filesystem::path& path) {
    HeatmapRange range;
    const auto px = heatmap_pixels(field.values(), range);
    const Grid& g = field.grid();
    {
        auto out = open_out(path, true);
        out << "P5\n" << g.n2() << ' ' << g.n1() << "\n255\n";
        out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
        if (!out) throw std::runtime_error("write failed: " + path.string());
    }
    nlohmann::json side = {{"min", range.min}, {"max", range.max}, {"width", g.n2()}, {"height", g.n1()}};
    write_text(path.string() + ".json", side.dump(2) + "\n");
    return range;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace fieldext::io
