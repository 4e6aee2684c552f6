// Command-line driver: simulate data, build the spectral model, extrapolate,
// and run end-to-end experiments with reproducible output directories.

#include "fieldext/errors.hpp"
#include "fieldext/harness.hpp"
#include "fieldext/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fieldext;

namespace {

struct Options {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::string block_form;
    std::string lambda_order;
    bool quiet = false;
    bool dump_kernels = false;
};

Scenario load_scenario(const Options& o) {
    Scenario s = o.config.empty() ? scenario_fig1_default()
                                  : scenario_from_json(json::parse(io::read_text(o.config)));
    if (o.seed) s.seed = *o.seed;
    if (!o.block_form.empty()) s.block_form = parse_block_form(o.block_form);
    if (!o.lambda_order.empty()) s.lambda_order = parse_lambda_order(o.lambda_order);
    s.validate();
    return s;
}

void say(const Options& o, const std::string& msg) {
    if (!o.quiet) std::cerr << msg << '\n';
}

std::vector<int> parse_list(const std::string& text) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find(',', pos);
        const std::string item = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (!item.empty()) out.push_back(std::stoi(item));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (out.empty()) throw ConfigError("empty list '" + text + "'");
    return out;
}

json spectrum_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

int cmd_simulate(const Options& o) {
    const Scenario s = load_scenario(o);
    Experiment ex(s);
    const FieldSample meas = ex.measurement(s.noise_sigma_rel, s.seed);
    const fs::path dir = o.out;
    io::write_field_csv(meas, dir / "meas.csv");
    io::write_field_csv(ex.truth_eval(), dir / "true.csv");
    const auto m = net_moment(ex.magnetisation());
    json manifest = {{"scenario", to_json(s)},
                     {"assumptions", scenario_assumptions(s)},
                     {"net_moment", {m[0], m[1], m[2]}},
                     {"outputs", {"manifest.json", "meas.csv", "true.csv"}}};
    io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    say(o, "wrote " + (dir / "meas.csv").string());
    return 0;
}

int cmd_basis(const Options& o) {
    const Scenario s = load_scenario(o);
    const SpectralBasis b = eig_k12(s.make_meas_grid(), s.kernel_params(), s.J);
    const fs::path dir = o.out;
    io::write_series_csv(b.mu, "mu", dir / "spectrum_mu.csv");
    io::write_series_csv(b.mu, "mu", dir / "basis" / "spectrum.csv");
    if (o.dump_kernels) {
        const Grid g = s.make_meas_grid();
        write_binary(assemble(KernelKind::K12, g, g, s.kernel_params()).entries, dir / "k12.bin");
        write_binary(assemble(KernelKind::K3, g, g, s.kernel_params()).entries, dir / "k3.bin");
    }
    char name[32];
    for (int j = 0; j < b.size(); ++j) {
        std::snprintf(name, sizeof name, "phi_%03d.csv", j + 1);
        io::write_field_csv(b.eigenfunction(j), dir / "basis" / name);
    }
    json manifest = {{"scenario", to_json(s)}, {"J", b.size()}, {"mu", spectrum_json(b.mu)},
                     {"max_residual", b.max_residual}};
    io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    say(o, "wrote " + std::to_string(b.size()) + " eigenfunctions to " + (dir / "basis").string());
    return 0;
}

json model_json(const Scenario& s, const BlockModel& m) {
    const auto& aux = *m.aux;
    const auto probes = default_rj_probes(s.q);
    json jp = json::array();
    for (const Point p : probes) jp.push_back({p.x1, p.x2});
    return {{"J", aux.J()},
            {"N", m.size()},
            {"h", s.h},
            {"meas_grid", {m.grid.n1(), m.grid.n2()}},
            {"block_form", std::string(to_string(m.form))},
            {"lambda_order", std::string(to_string(m.order))},
            {"mu", spectrum_json(aux.basis->mu)},
            {"lambda", spectrum_json(m.lambda)},
            {"diagnostics",
             {{"rj_probes", jp},
              {"rj_norms", residual_rj(*aux.basis, s.kernel_params(), probes)},
              {"aux_construction_gap", aux.construction_gap},
              {"mixed_symmetry_gap", aux.mixed_symmetry_gap},
              {"max_basis_residual", aux.basis->max_residual},
              {"max_block_residual", m.residuals.maxCoeff()}}}};
}

int cmd_build(const Options& o) {
    const Scenario s = load_scenario(o);
    Experiment ex(s);
    const BlockModel m = ex.model(s.J, s.N);
    json j = model_json(s, m);
    j["diagnostics"]["block_asymmetry"] = ex.spectrum(s.J).block->asymmetry;
    const fs::path dir = o.out;
    io::write_text(dir / "model.json", j.dump(2) + "\n");
    io::write_series_csv(m.aux->basis->mu, "mu", dir / "spectrum_mu.csv");
    io::write_series_csv(m.lambda, "lambda", dir / "spectrum_lambda.csv");
    say(o, "wrote " + (dir / "model.json").string());
    return 0;
}

int cmd_extrapolate(const Options& o, const std::string& meas_path) {
    const Scenario s = load_scenario(o);
    const FieldSample meas = io::read_field_csv(meas_path, s.make_meas_grid());
    Experiment ex(s);
    const BlockModel m = ex.model(s.J, s.N);
    const Extrapolation e = extrapolate(m, meas, s.make_eval_grid(), s.kernel_params());
    const fs::path dir = o.out;
    io::write_field_csv(e.field, dir / "ext.csv");
    io::write_series_csv(e.b, "b", dir / "b_coeffs.csv");
    json j = model_json(s, m);
    j["b"] = spectrum_json(e.b);
    j["measurement"] = meas_path;
    io::write_text(dir / "model.json", j.dump(2) + "\n");
    say(o, "wrote " + (dir / "ext.csv").string());
    return 0;
}

int cmd_run(const Options& o) {
    const Scenario s = load_scenario(o);
    const RunArtifacts art = run(s);
    write_run(art, o.out);
    if (art.report.status != "ok") {
        std::cerr << "run failed in stage '" << art.report.failed_stage << "': " << art.report.status << '\n';
        return 2;
    }
    char line[200];
    std::snprintf(line, sizeof line, "J=%d N=%d  error_eval=%.4f  error_Q=%.4f", art.report.J,
                  art.report.N, art.report.metrics.eval.value, art.report.metrics.q.value);
    say(o, line);
    return 0;
}

int cmd_sweep(const Options& o, const std::string& js, const std::string& ns) {
    const Scenario s = load_scenario(o);
    const auto jl = parse_list(js);
    const auto nl = parse_list(ns);
    const auto reports = sweep(s, jl, nl);
    const fs::path dir = o.out;
    write_sweep_csv(reports, dir / "sweep.csv");
    json all = json::array();
    for (const auto& r : reports) all.push_back(to_json(r));
    io::write_text(dir / "sweep.json", all.dump(2) + "\n");
    for (const auto& r : reports) {
        char line[200];
        std::snprintf(line, sizeof line, "J=%3d N=%3d  error_eval=%.4f  error_Q=%.4f  %s", r.J, r.N,
                      r.metrics.eval.value, r.metrics.q.value, r.status.c_str());
        say(o, line);
    }
    return 0;
}

int cmd_heatmap(const Options& o, const std::string& in) {
    const FieldSample f = io::read_field_csv(in);
    fs::path target = o.out;
    if (target.extension() != ".pgm") target /= fs::path(in).stem().string() + ".pgm";
    const auto range = io::emit_heatmap(f, target);
    say(o, "wrote " + target.string() + " (min " + std::to_string(range.min) + ", max " +
               std::to_string(range.max) + ")");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planar B3 field extrapolation from a bounded measurement patch"};
    app.require_subcommand(1);
    Options o;
    bool print_config = false;
    app.add_flag("--print-default-config", print_config, "Print the default scenario as JSON and exit");
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Scenario JSON (default: built-in four-rectangle scenario)");
        sub->add_option("--out", o.out, "Output directory (heatmap: file or directory)");
        sub->add_option("--seed", o.seed, "Noise seed override");
        sub->add_option("--block-form", o.block_form, "selfadjoint | literal")
            ->check(CLI::IsMember({"selfadjoint", "literal"}));
        sub->add_option("--lambda-order", o.lambda_order, "modulus | algebraic")
            ->check(CLI::IsMember({"modulus", "algebraic"}));
        sub->add_flag("--quiet", o.quiet, "Suppress progress output");
    };
    app.require_subcommand(0, 1);

    auto* simulate = app.add_subcommand("simulate", "Forward-simulate measurement and ground-truth fields");
    auto* basis = app.add_subcommand("basis", "Leading eigenpairs of the K12 operator on Q");
    auto* build = app.add_subcommand("build", "Build the block model and write model.json");
    auto* extrap = app.add_subcommand("extrapolate", "Extrapolate a measurement CSV to the eval grid");
    auto* runc = app.add_subcommand("run", "End-to-end experiment with all outputs");
    auto* sweepc = app.add_subcommand("sweep", "Grid of runs over J and N");
    auto* heat = app.add_subcommand("heatmap", "Render a field CSV as an 8-bit PGM");
    for (auto* sub : {simulate, basis, build, extrap, runc, sweepc, heat}) common(sub);

    basis->add_flag("--dump-kernels", o.dump_kernels, "Also write k12.bin and k3.bin kernel matrices");
    std::string meas_path;
    extrap->add_option("--meas", meas_path, "Measurement CSV on the Q grid")->required();
    std::string j_list = "10,20,40,80", n_list = "10,20,30,40,60,80";
    sweepc->add_option("--J-list", j_list, "Comma-separated J values");
    sweepc->add_option("--N-list", n_list, "Comma-separated N values");
    std::string heat_in;
    heat->add_option("--in", heat_in, "Field CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (print_config) {
            std::cout << to_json(scenario_fig1_default()).dump(2) << '\n';
            return 0;
        }
        if (*simulate) return cmd_simulate(o);
        if (*basis) return cmd_basis(o);
        if (*build) return cmd_build(o);
        if (*extrap) return cmd_extrapolate(o, meas_path);
        if (*runc) return cmd_run(o);
        if (*sweepc) return cmd_sweep(o, j_list, n_list);
        if (*heat) return cmd_heatmap(o, heat_in);
        std::cerr << app.help() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
