#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lsmkit/experiment.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> solver;
    std::optional<double> alpha_mlsm;
    std::optional<double> alpha_mf;
    std::optional<std::string> threshold;
    std::optional<std::string> out_dir;
    std::optional<std::string> mf_mode;
    std::optional<unsigned> threads;
    std::vector<double> apertures;
    std::vector<double> snrs;
    bool l_curve = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "experiment spec JSON file");
    cmd->add_option("--seed", f.seed, "rng seed override");
    cmd->add_option("--solver", f.solver, "forward solver: series|mom");
    cmd->add_option("--alpha-mlsm", f.alpha_mlsm, "fixed Tikhonov alpha for LSM/MLSM");
    cmd->add_option("--alpha-mf", f.alpha_mf, "fixed Tikhonov alpha for MF-MLSM");
    cmd->add_option("--threshold", f.threshold, "binarization: otsu | fixed:<tau>");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--mf-mode", f.mf_mode, "MF-MLSM assembly: filtered|stacked|phase_corrected");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
    cmd->add_option("--aperture", f.apertures, "aperture degrees (repeatable)");
    cmd->add_option("--snr", f.snrs, "SNR in dB (repeatable)");
    cmd->add_flag("--l-curve", f.l_curve, "select alpha via the L-curve corner");
}

lsm::ExperimentSpec resolve_spec(const CommonFlags& f) {
    lsm::ExperimentSpec spec;
    if (!f.config_path.empty())
        spec = lsm::ExperimentSpec::from_json_string(lsm::read_file(f.config_path));
    if (f.seed) spec.scene.rng_seed = *f.seed;
    if (f.solver) {
        if (*f.solver == "series")
            spec.solver = lsm::ForwardSolver::Series;
        else if (*f.solver == "mom")
            spec.solver = lsm::ForwardSolver::Mom;
        else
            throw lsm::ValidationError("--solver must be series or mom");
    }
    if (f.alpha_mlsm) spec.alpha_mlsm = *f.alpha_mlsm;
    if (f.alpha_mf) spec.alpha_mf = *f.alpha_mf;
    if (f.threshold) spec.threshold = lsm::ThresholdPolicy::parse(*f.threshold);
    if (f.out_dir) spec.out_dir = *f.out_dir;
    if (f.threads) spec.threads = *f.threads;
    if (f.l_curve) spec.use_l_curve = true;
    if (f.mf_mode) {
        if (*f.mf_mode == "filtered")
            spec.mf_mode = lsm::MfMode::Filtered;
        else if (*f.mf_mode == "stacked")
            spec.mf_mode = lsm::MfMode::Stacked;
        else if (*f.mf_mode == "phase_corrected")
            spec.mf_mode = lsm::MfMode::PhaseCorrected;
        else
            throw lsm::ValidationError("--mf-mode must be filtered, stacked or phase_corrected");
    }
    if (!f.apertures.empty()) spec.aperture_degrees = f.apertures;
    if (!f.snrs.empty()) {
        spec.snrs_db.clear();
        for (double s : f.snrs) spec.snrs_db.emplace_back(s);
    }
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D TM inverse-imaging experiments: LSM, MLSM and MF-MLSM"};
    app.require_subcommand(1);

    CommonFlags forward_flags, invert_flags, report_flags, repro_flags;
    auto* cmd_fwd = app.add_subcommand("forward", "synthesize scattered-field datasets");
    add_common(cmd_fwd, forward_flags);
    auto* cmd_inv = app.add_subcommand("invert", "run inversions, write maps and reports");
    add_common(cmd_inv, invert_flags);
    auto* cmd_rep = app.add_subcommand("report", "aggregate run reports into tables");
    add_common(cmd_rep, report_flags);
    auto* cmd_paper =
        app.add_subcommand("reproduce-paper", "full pipeline for the reference experiment");
    add_common(cmd_paper, repro_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_fwd->parsed()) {
            const auto spec = resolve_spec(forward_flags);
            for (const auto& p : lsm::cmd_forward(spec))
                std::cerr << "[lsmkit] wrote " << p.string() << ".{lsmd,json}\n";
        } else if (cmd_inv->parsed()) {
            const auto spec = resolve_spec(invert_flags);
            const auto results = lsm::cmd_invert(spec);
            lsm::cmd_report(spec, results);
        } else if (cmd_rep->parsed()) {
            const auto spec = resolve_spec(report_flags);
            lsm::cmd_report_from_dir(spec);
        } else if (cmd_paper->parsed()) {
            const auto spec = resolve_spec(repro_flags);
            const auto out = lsm::reproduce_paper(spec);
            std::cerr << "[lsmkit] table written to " << out.table_csv.string() << "\n";
        }
    } catch (const lsm::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const lsm::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
