#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lsmkit/dataset_io.hpp"
#include "lsmkit/metrics.hpp"

namespace lsm {

// Full experiment description: which scene to synthesize and which
// (method, aperture, snr) cells to invert and report.
struct ExperimentSpec {
    SceneConfig scene = SceneConfig::reference_default();
    std::vector<Method> methods{Method::MlsmParallel, Method::MfMlsm};
    std::vector<double> aperture_degrees{180.0, 144.0, 93.6};
    std::vector<std::optional<double>> snrs_db{27.0, 12.0};
    std::optional<double> alpha_mlsm; // absent -> per-snr defaults
    std::optional<double> alpha_mf;
    bool use_l_curve = false;          // scene.alpha_policy mode mirror
    ForwardSolver solver = ForwardSolver::Series;
    double mom_cell_size = 0.0;        // 0 = lambda_min/10
    MfMode mf_mode = MfMode::Filtered;
    ThresholdPolicy threshold;         // default otsu
    std::filesystem::path out_dir = "out";
    unsigned threads = 0;

    static ExperimentSpec reference_default();
    static ExperimentSpec from_json_string(const std::string& text);
    std::string to_json_string(int indent = 2) const;
};

// Regularization defaults for this codebase's data normalization (see
// README): MLSM 5e-3 at >=20 dB, 7e-3 below, 1e-3 noiseless; MF-MLSM 1e-6.
double default_alpha(Method method, std::optional<double> snr_db);

// One resolved (method, aperture, snr) cell.
struct RunConfig {
    Method method = Method::MlsmParallel;
    double aperture_degrees = 360.0;
    std::optional<double> snr_db;
    double alpha = 0.0;
    std::string scenario;  // e.g. "aperture180_snr27"
    std::string run_id;    // deterministic hash of the resolved config
};

// Cross product of methods x apertures x snrs; one run per combination.
std::vector<RunConfig> expand_runs(const ExperimentSpec& spec);

struct RunResult {
    RunConfig run;
    ReconstructionReport report;
    std::filesystem::path map_csv, map_pgm, map_json;
};

// Synthesizes the canonical full-ring dataset (noiseless + one noisy variant
// per distinct snr). Returns the dataset base paths written.
std::vector<std::filesystem::path> cmd_forward(const ExperimentSpec& spec);

// Loads the datasets written by cmd_forward, applies each run's aperture at
// load time, runs the inversion, writes maps and per-run reports.
std::vector<RunResult> cmd_invert(const ExperimentSpec& spec);

// Aggregates per-run reports into the side-by-side table (table1.csv), the
// per-cell listing (cells.csv) and a provenance summary.json; prints the
// console table to stderr. Returns the table CSV path.
std::filesystem::path cmd_report(const ExperimentSpec& spec,
                                 const std::vector<RunResult>& results);

// Same aggregation, but re-reads the *_report.json files cmd_invert wrote
// under <out_dir>/maps (sorted by filename for determinism).
std::filesystem::path cmd_report_from_dir(const ExperimentSpec& spec);

struct ReproduceResult {
    std::vector<RunResult> table_cells; // the eight 180/144-degree cells
    std::vector<RunResult> fig6_cells;  // the two 93.6-degree / 27 dB cells
    std::filesystem::path table_csv;
};

// forward -> invert -> report for the reference experiment matrix:
// {180, 144} x {27, 12} x methods plus {93.6} x {27} x methods.
ReproduceResult reproduce_paper(const ExperimentSpec& spec);

} // namespace lsm
