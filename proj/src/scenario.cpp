#include "fieldext/scenario.hpp"

#include "fieldext/errors.hpp"

#include <set>

namespace fieldext {

namespace {

using nlohmann::json;

json rect_json(const Rect& r) { return json::array({r.x1_min, r.x1_max, r.x2_min, r.x2_max}); }

Rect rect_from(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 4) throw ConfigError(key + ": expected [x1_min, x1_max, x2_min, x2_max]");
    Rect r{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    r.validate();
    return r;
}

json dims_json(const GridDims& d) { return json::array({d.n1, d.n2}); }

GridDims dims_from(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(key + ": expected [n1, n2]");
    return {j[0].get<int>(), j[1].get<int>()};
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
    for (const auto& key : allowed) {
        if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    }
}

}  // namespace

void Scenario::validate() const {
    q.validate();
    eval_rect.validate();
    kernel_params().validate();
    for (const GridDims& d : {source_grid, meas_grid, eval_grid}) {
        if (d.n1 < 1 || d.n2 < 1) throw ConfigError("grid dimensions must be positive");
    }
    const long nodes = static_cast<long>(meas_grid.n1) * meas_grid.n2;
    if (J < 1 || J > nodes) throw ConfigError("J must lie in [1, " + std::to_string(nodes) + "]");
    if (N < 1 || N > 2 * nodes) throw ConfigError("N must lie in [1, " + std::to_string(2 * nodes) + "]");
    if (!(noise_sigma_rel >= 0.0)) throw ConfigError("noise sigma_rel must be non-negative");
    for (const auto& m : magnetisation) {
        m.region.validate();
        if (!q.contains(m.region)) throw ConfigError("magnetisation rectangle not contained in Q");
    }
}

Scenario scenario_fig1_default() {
    Scenario s;
    // Approximate placement of the four patches; amplitudes and directions are assumptions.
    s.magnetisation = {
        {{-0.8, -0.3, 0.2, 0.7}, {0.0, 0.0, 1.0}, 1.0},
        {{0.1, 0.6, 0.4, 0.8}, {0.0, 0.0, 1.0}, 1.0},
        {{-0.6, -0.1, -0.8, -0.4}, {0.0, 0.0, 1.0}, 1.0},
        {{0.3, 0.8, -0.7, -0.1}, {0.0, 0.0, 1.0}, 1.0},
    };
    return s;
}

std::vector<std::string> scenario_assumptions(const Scenario& s) {
    const Scenario d = scenario_fig1_default();
    std::vector<std::string> notes;
    if (s.h == d.h) notes.push_back("h=0.25 is an assumed measurement height (h << diam(Q))");
    if (s.meas_grid == d.meas_grid) notes.push_back("40x40 measurement grid is an assumed resolution");
    if (s.source_grid == d.source_grid)
        notes.push_back("120x120 source grid for ground truth is an assumed resolution");
    if (s.magnetisation == d.magnetisation)
        notes.push_back("rectangle placement and unit out-of-plane magnetisation approximate the reference figure");
    if (s.eval_grid == d.eval_grid) notes.push_back("200x200 evaluation grid is an assumed resolution");
    return notes;
}

Magnetisation build_magnetisation(const Scenario& s) {
    const Grid g = s.make_source_grid();
    Magnetisation mag(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Point p = g.node(k);
        for (const auto& m : s.magnetisation) {
            const Rect& r = m.region;
            if (p.x1 > r.x1_min && p.x1 < r.x1_max && p.x2 > r.x2_min && p.x2 < r.x2_max) {
                const auto i = static_cast<Eigen::Index>(k);
                mag.m1[i] += m.amplitude * m.direction[0];
                mag.m2[i] += m.amplitude * m.direction[1];
                mag.m3[i] += m.amplitude * m.direction[2];
            }
        }
    }
    return mag;
}

json to_json(const Scenario& s) {
    json mags = json::array();
    for (const auto& m : s.magnetisation) {
        mags.push_back({{"rect", rect_json(m.region)},
                        {"direction", json::array({m.direction[0], m.direction[1], m.direction[2]})},
                        {"amplitude", m.amplitude}});
    }
    return {
        {"q", rect_json(s.q)},
        {"h", s.h},
        {"source_grid", dims_json(s.source_grid)},
        {"meas_grid", dims_json(s.meas_grid)},
        {"eval_rect", rect_json(s.eval_rect)},
        {"eval_grid", dims_json(s.eval_grid)},
        {"J", s.J},
        {"N", s.N},
        {"block_form", std::string(to_string(s.block_form))},
        {"lambda_order", std::string(to_string(s.lambda_order))},
        {"noise", {{"sigma_rel", s.noise_sigma_rel}, {"seed", s.seed}}},
        {"magnetisation", mags},
    };
}

Scenario scenario_from_json(const json& j) {
    try {
        check_keys(j,
                   {"q", "h", "source_grid", "meas_grid", "eval_rect", "eval_grid", "J", "N",
                    "block_form", "lambda_order", "noise", "magnetisation"},
                   "config");
        Scenario s;
        s.q = rect_from(j.at("q"), "q");
        s.h = j.at("h").get<double>();
        s.source_grid = dims_from(j.at("source_grid"), "source_grid");
        s.meas_grid = dims_from(j.at("meas_grid"), "meas_grid");
        s.eval_rect = rect_from(j.at("eval_rect"), "eval_rect");
        s.eval_grid = dims_from(j.at("eval_grid"), "eval_grid");
        s.J = j.at("J").get<int>();
        s.N = j.at("N").get<int>();
        s.block_form = parse_block_form(j.at("block_form").get<std::string>());
        s.lambda_order = parse_lambda_order(j.at("lambda_order").get<std::string>());
        const json& noise = j.at("noise");
        check_keys(noise, {"sigma_rel", "seed"}, "noise");
        s.noise_sigma_rel = noise.at("sigma_rel").get<double>();
        s.seed = noise.at("seed").get<std::uint64_t>();
        if (!j.at("magnetisation").is_array()) throw ConfigError("magnetisation: expected an array");
        for (const json& m : j.at("magnetisation")) {
            check_keys(m, {"rect", "direction", "amplitude"}, "magnetisation entry");
            const json& d = m.at("direction");
            if (!d.is_array() || d.size() != 3) throw ConfigError("direction: expected 3 numbers");
            s.magnetisation.push_back({rect_from(m.at("rect"), "rect"),
                                       {d[0].get<double>(), d[1].get<double>(), d[2].get<double>()},
                                       m.at("amplitude").get<double>()});
        }
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

}  // namespace fieldext
