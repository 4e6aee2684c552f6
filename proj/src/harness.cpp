#include "fieldext/harness.hpp"

#include "fieldext/errors.hpp"
#include "fieldext/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace fieldext {

namespace {

using nlohmann::json;

// Stage currently executing, for error reports from run()/sweep().
thread_local std::string g_stage;

json vec_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

ErrorMetric relative_l2_error(const ScalarField& approx, const ScalarField& reference) {
    require_same_grid(approx.grid(), reference.grid(), "relative_l2_error");
    const ScalarField diff(approx.grid(), approx.values() - reference.values());
    const double ref = norm(reference);
    if (ref < kRelativeErrorGuard) return {norm(diff), false};
    return {norm(diff) / ref, true};
}

std::vector<Point> default_rj_probes(const Rect& q) {
    const double c1 = 0.5 * (q.x1_min + q.x1_max), c2 = 0.5 * (q.x2_min + q.x2_max);
    const double a1 = 0.25 * q.width(), a2 = 0.25 * q.height();
    return {{c1, c2}, {c1 - a1, c2 - a2}, {c1 + a1, c2 - a2}, {c1 - a1, c2 + a2}, {c1 + a1, c2 + a2}};
}

template <class F>
auto Experiment::timed(const std::string& stage, F&& f) {
    g_stage = stage;
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
        f();
        timings_.push_back({stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
    } else {
        auto out = f();
        timings_.push_back({stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
        return out;
    }
}

namespace {

Scenario validated(Scenario s) {
    g_stage = "simulate";
    s.validate();
    return s;
}

}  // namespace

Experiment::Experiment(Scenario scenario)
    : scenario_(validated(std::move(scenario))),
      mag_(build_magnetisation(scenario_)),
      meas_clean_(scenario_.make_meas_grid()),
      truth_eval_(scenario_.make_eval_grid()) {
    const KernelParams params = scenario_.kernel_params();
    meas_clean_ = timed("simulate", [&] { return forward_eq1(mag_, scenario_.make_meas_grid(), params); });
    truth_eval_ = timed("simulate_eval", [&] { return forward_eq1(mag_, scenario_.make_eval_grid(), params); });
}

FieldSample Experiment::measurement(double sigma_rel, std::uint64_t seed) const {
    return add_noise(meas_clean_, sigma_rel, seed);
}

std::shared_ptr<const SpectralBasis> Experiment::basis(int J) {
    if (!full_basis_ || full_basis_->size() < J) {
        full_basis_ = timed("eig_k12", [&] {
            return std::make_shared<const SpectralBasis>(
                eig_k12(scenario_.make_meas_grid(), scenario_.kernel_params(), J));
        });
    }
    if (full_basis_->size() == J) return full_basis_;
    return std::make_shared<const SpectralBasis>(truncate(*full_basis_, J));
}

std::shared_ptr<const AuxOperator> Experiment::aux(int J) {
    if (auto it = aux_.find(J); it != aux_.end()) return it->second;
    auto b = basis(J);
    auto a = timed("build_aux", [&] {
        return std::make_shared<const AuxOperator>(build_aux(b, scenario_.kernel_params()));
    });
    aux_.emplace(J, a);
    return a;
}

const BlockSpectrum& Experiment::spectrum(int J) {
    if (auto it = spectra_.find(J); it != spectra_.end()) return it->second;
    auto a = aux(J);
    auto block = timed("assemble_block", [&] {
        return std::make_shared<const BlockOperator>(
            assemble_block(a, scenario_.kernel_params(), scenario_.block_form));
    });
    auto spec = timed("solve_block", [&] { return decompose_block(block); });
    return spectra_.emplace(J, std::move(spec)).first->second;
}

BlockModel Experiment::model(int J, int N) {
    const BlockSpectrum& spec = spectrum(J);
    return timed("select_modes", [&] { return select_modes(spec, N, scenario_.lambda_order); });
}

RunArtifacts Experiment::evaluate(int J, int N, const FieldSample& meas) {
    RunArtifacts art;
    RunReport& rep = art.report;
    rep.scenario = scenario_;
    rep.J = J;
    rep.N = N;
    const KernelParams params = scenario_.kernel_params();

    const BlockModel m = model(J, N);
    const Extrapolant ext = timed("extrapolate", [&] { return make_extrapolant(m, meas, params); });
    FieldSample ext_eval = timed("extrapolate", [&] { return ext.on(scenario_.make_eval_grid()); });
    const FieldSample ext_q = timed("extrapolate", [&] { return ext.on(scenario_.make_meas_grid()); });

    g_stage = "metrics";
    rep.metrics.eval = relative_l2_error(ext_eval, truth_eval_);
    rep.metrics.q = relative_l2_error(ext_q, meas_clean_);
    rep.metrics.max_abs_eval = (ext_eval.values() - truth_eval_.values()).cwiseAbs().maxCoeff();

    const auto b = basis(J);
    const auto a = aux(J);
    const BlockSpectrum& spec = spectrum(J);
    Diagnostics& d = rep.diagnostics;
    d.mu_head = b->mu.head(std::min(10, b->size()));
    d.lambda_head = m.lambda.head(std::min(10, m.size()));
    d.rj_probes = default_rj_probes(scenario_.q);
    d.rj_norms = residual_rj(*b, params, d.rj_probes);
    d.aux_construction_gap = a->construction_gap;
    d.mixed_symmetry_gap = a->mixed_symmetry_gap;
    d.block_asymmetry = spec.block->asymmetry;
    d.block_asymmetry_frobenius = spec.block->asymmetry_frobenius;
    d.max_basis_residual = b->max_residual;
    d.max_block_residual = m.residuals.maxCoeff();

    art.meas = meas;
    art.truth_eval = truth_eval_;
    art.ext_eval = std::move(ext_eval);
    art.mu = b->mu;
    art.lambda = m.lambda;
    art.b = ext.b;
    return art;
}

RunArtifacts run(const Scenario& scenario) {
    RunArtifacts art;
    art.report.scenario = scenario;
    art.report.J = scenario.J;
    art.report.N = scenario.N;
    std::unique_ptr<Experiment> ex;
    try {
        ex = std::make_unique<Experiment>(scenario);
        const FieldSample meas = ex->measurement(scenario.noise_sigma_rel, scenario.seed);
        art = ex->evaluate(scenario.J, scenario.N, meas);
        art.report.timings = ex->timings();
    } catch (const std::exception& e) {
        art.report.status = e.what();
        art.report.failed_stage = g_stage;
        if (ex) {
            art.report.timings = ex->timings();
            art.meas = ex->measurement(0.0, 0);
        }
    }
    return art;
}

std::vector<RunReport> sweep(const Scenario& scenario, std::span<const int> J_list,
                             std::span<const int> N_list) {
    if (J_list.empty() || N_list.empty()) throw ConfigError("sweep needs non-empty J and N lists");
    std::vector<RunReport> out;
    Experiment ex(scenario);
    const FieldSample meas = ex.measurement(scenario.noise_sigma_rel, scenario.seed);
    try {
        ex.basis(std::min<int>(*std::max_element(J_list.begin(), J_list.end()),
                               static_cast<int>(scenario.make_meas_grid().size())));
    } catch (const std::exception&) {
        // per-cell errors are reported below
    }
    for (const int J : J_list) {
        for (const int N : N_list) {
            RunReport rep;
            rep.scenario = scenario;
            rep.scenario.J = J;
            rep.scenario.N = N;
            rep.J = J;
            rep.N = N;
            try {
                if (J < 1 || static_cast<std::size_t>(J) > ex.clean_measurement().grid().size())
                    throw ConfigError("J out of range");
                rep = ex.evaluate(J, N, meas).report;
                rep.scenario.J = J;
                rep.scenario.N = N;
            } catch (const std::exception& e) {
                rep.status = e.what();
                rep.failed_stage = g_stage;
            }
            out.push_back(std::move(rep));
        }
    }
    if (!out.empty()) out.front().timings = ex.timings();
    return out;
}

json to_json(const RunReport& r, bool include_timing) {
    json probes = json::array();
    for (const Point p : r.diagnostics.rj_probes) probes.push_back({p.x1, p.x2});
    json j = {
        {"scenario", to_json(r.scenario)},
        {"assumptions", scenario_assumptions(r.scenario)},
        {"J", r.J},
        {"N", r.N},
        {"status", r.status},
        {"failed_stage", r.failed_stage},
        {"metrics",
         {{"error_eval", r.metrics.eval.value},
          {"error_eval_is_relative", r.metrics.eval.relative},
          {"error_q", r.metrics.q.value},
          {"error_q_is_relative", r.metrics.q.relative},
          {"max_abs_error_eval", r.metrics.max_abs_eval}}},
        {"diagnostics",
         {{"mu_head", vec_json(r.diagnostics.mu_head)},
          {"lambda_head", vec_json(r.diagnostics.lambda_head)},
          {"rj_probes", probes},
          {"rj_norms", r.diagnostics.rj_norms},
          {"aux_construction_gap", r.diagnostics.aux_construction_gap},
          {"mixed_symmetry_gap", r.diagnostics.mixed_symmetry_gap},
          {"block_asymmetry", r.diagnostics.block_asymmetry},
          {"block_asymmetry_frobenius", r.diagnostics.block_asymmetry_frobenius},
          {"max_basis_residual", r.diagnostics.max_basis_residual},
          {"max_block_residual", r.diagnostics.max_block_residual}}},
    };
    if (include_timing) {
        json t = json::array();
        for (const auto& s : r.timings) t.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
        j["timings"] = t;
    }
    return j;
}

void write_run(const RunArtifacts& art, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json manifest = to_json(art.report);
    json outputs = json::array({"manifest.json"});
    auto field = [&](const std::optional<FieldSample>& f, const std::string& name) {
        if (!f) return;
        io::write_field_csv(*f, dir / (name + ".csv"));
        io::emit_heatmap(*f, dir / (name + ".pgm"));
        outputs.push_back(name + ".csv");
        outputs.push_back(name + ".pgm");
    };
    field(art.meas, "meas");
    field(art.truth_eval, "true");
    field(art.ext_eval, "ext");
    if (art.ext_eval && art.truth_eval) {
        const FieldSample err(art.ext_eval->grid(), art.ext_eval->values() - art.truth_eval->values());
        io::write_field_csv(err, dir / "error.csv");
        io::emit_heatmap(FieldSample(err.grid(), err.values().cwiseAbs()), dir / "abs_error.pgm");
        outputs.push_back("error.csv");
        outputs.push_back("abs_error.pgm");
    }
    if (art.mu.size() > 0) {
        io::write_series_csv(art.mu, "mu", dir / "spectrum_mu.csv");
        outputs.push_back("spectrum_mu.csv");
    }
    if (art.lambda.size() > 0) {
        io::write_series_csv(art.lambda, "lambda", dir / "spectrum_lambda.csv");
        io::write_series_csv(art.b, "b", dir / "b_coeffs.csv");
        outputs.push_back("spectrum_lambda.csv");
        outputs.push_back("b_coeffs.csv");
    }
    manifest["outputs"] = outputs;
    io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

void write_sweep_csv(const std::vector<RunReport>& reports, const std::filesystem::path& path) {
    std::string text = "J,N,error_Q,error_eval,status\n";
    char buf[128];
    for (const auto& r : reports) {
        const bool ok = r.status == "ok";
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,", r.J, r.N, ok ? r.metrics.q.value : NAN,
                      ok ? r.metrics.eval.value : NAN);
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        text += buf + status + "\n";
    }
    io::write_text(path, text);
}

}  // namespace fieldext
