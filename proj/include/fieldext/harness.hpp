#pragma once

#include "fieldext/extrapolator.hpp"
#include "fieldext/forward.hpp"
#include "fieldext/scenario.hpp"
#include "fieldext/spectral.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fieldext {

/// Below this norm the reference field counts as zero and errors are reported absolute.
inline constexpr double kRelativeErrorGuard = 1e-14;

struct ErrorMetric {
    double value = 0.0;
    bool relative = true;  // false: absolute L2 because the reference norm was below the guard
};

/// ||approx - reference|| / ||reference|| in the quadrature norm, with the zero guard.
ErrorMetric relative_l2_error(const ScalarField& approx, const ScalarField& reference);

struct Metrics {
    ErrorMetric eval;  // on eval_rect
    ErrorMetric q;     // on the measurement grid over Q
    double max_abs_eval = 0.0;
};

struct Diagnostics {
    Eigen::VectorXd mu_head;
    Eigen::VectorXd lambda_head;
    std::vector<Point> rj_probes;
    std::vector<double> rj_norms;
    double aux_construction_gap = 0.0;
    double mixed_symmetry_gap = 0.0;
    double block_asymmetry = 0.0;
    double block_asymmetry_frobenius = 0.0;
    double max_basis_residual = 0.0;
    double max_block_residual = 0.0;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunReport {
    Scenario scenario;
    int J = 0;
    int N = 0;
    std::string status = "ok";  // or the error message of the failing stage
    std::string failed_stage;
    Metrics metrics;
    Diagnostics diagnostics;
    std::vector<StageTiming> timings;
};

struct RunArtifacts {
    RunReport report;
    std::optional<FieldSample> meas;
    std::optional<FieldSample> truth_eval;
    std::optional<FieldSample> ext_eval;
    Eigen::VectorXd mu;
    Eigen::VectorXd lambda;
    Eigen::VectorXd b;
};

/// Staged pipeline with caching: the K12 basis is computed once at the largest
/// J requested, and each J keeps its block decomposition for every N.
class Experiment {
public:
    explicit Experiment(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }
    const Magnetisation& magnetisation() const { return mag_; }
    const FieldSample& clean_measurement() const { return meas_clean_; }
    const FieldSample& truth_eval() const { return truth_eval_; }
    FieldSample measurement(double sigma_rel, std::uint64_t seed) const;

    std::shared_ptr<const SpectralBasis> basis(int J);
    std::shared_ptr<const AuxOperator> aux(int J);
    const BlockSpectrum& spectrum(int J);
    BlockModel model(int J, int N);

    /// Extrapolate `meas` with (J, N) and compare with the ground truth.
    RunArtifacts evaluate(int J, int N, const FieldSample& meas);

    const std::vector<StageTiming>& timings() const { return timings_; }

private:
    template <class F>
    auto timed(const std::string& stage, F&& f);

    Scenario scenario_;
    Magnetisation mag_;
    FieldSample meas_clean_;
    FieldSample truth_eval_;
    std::shared_ptr<const SpectralBasis> full_basis_;
    std::map<int, std::shared_ptr<const AuxOperator>> aux_;
    std::map<int, BlockSpectrum> spectra_;
    std::vector<StageTiming> timings_;
};

/// The r_J probe set: centre of Q and the centres of its four quadrants.
std::vector<Point> default_rj_probes(const Rect& q);

RunArtifacts run(const Scenario& scenario);

std::vector<RunReport> sweep(const Scenario& scenario, std::span<const int> J_list,
                             std::span<const int> N_list);

nlohmann::json to_json(const RunReport& report, bool include_timing = true);

/// manifest.json, meas.csv, true.csv, ext.csv, error.csv, spectra, b_coeffs.csv, heatmaps.
void write_run(const RunArtifacts& artifacts, const std::filesystem::path& dir);

/// sweep.csv: J,N,error_Q,error_eval,status
void write_sweep_csv(const std::vector<RunReport>& reports, const std::filesystem::path& path);

}  // namespace fieldext
