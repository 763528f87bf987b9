#include "lsmkit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace lsm {

namespace {

std::string format_g(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

std::string scenario_name(double aperture_deg, std::optional<double> snr) {
    std::string s = "aperture" + format_g(aperture_deg);
    s += snr ? "_snr" + format_g(*snr) : "_noiseless";
    return s;
}

std::string dataset_base_name(std::optional<double> snr) {
    return snr ? "fullring_snr" + format_g(*snr) : "fullring_noiseless";
}

Method method_from_string(const std::string& s) {
    if (s == "MLSM" || s == "MLSM_parallel" || s == "mlsm") return Method::MlsmParallel;
    if (s == "MF_MLSM" || s == "mf_mlsm" || s == "mf") return Method::MfMlsm;
    if (s == "LSM_single" || s == "lsm" || s == "lsm_single") return Method::LsmSingle;
    throw ValidationError("unknown method '" + s + "'");
}

MfMode mf_mode_from_string(const std::string& s) {
    if (s == "filtered") return MfMode::Filtered;
    if (s == "stacked") return MfMode::Stacked;
    if (s == "phase_corrected") return MfMode::PhaseCorrected;
    throw ValidationError("unknown mf_mode '" + s + "' (filtered|stacked|phase_corrected)");
}

void validate_spec(const ExperimentSpec& spec) {
    std::vector<std::string> errors = validate(spec.scene);
    if (spec.methods.empty()) errors.push_back("methods: empty method list");
    if (spec.aperture_degrees.empty()) errors.push_back("aperture_degrees: empty");
    if (spec.snrs_db.empty()) errors.push_back("snrs_db: empty");
    for (double deg : spec.aperture_degrees) {
        try {
            (void)ApertureSelection::from_degrees(deg, spec.scene.ring.count);
        } catch (const ValidationError& e) {
            errors.push_back(e.what());
        }
    }
    if (!errors.empty()) {
        std::ostringstream ss;
        ss << "invalid experiment spec (" << errors.size() << " problem(s)):";
        for (const auto& e : errors) ss << "\n  - " << e;
        throw ValidationError(ss.str(), std::move(errors));
    }
    for (const auto& w : scene_warnings(spec.scene)) std::cerr << "[lsmkit] warning: " << w << "\n";
}

} // namespace

ExperimentSpec ExperimentSpec::reference_default() { return {}; }

double default_alpha(Method method, std::optional<double> snr_db) {
    if (method == Method::MfMlsm) return 1e-6;
    if (!snr_db) return 1e-3;
    return *snr_db >= 20.0 ? 5e-3 : 7e-3;
}

std::string ExperimentSpec::to_json_string(int indent) const {
    nlohmann::json j;
    j["scene"] = nlohmann::json::parse(scene.to_json_string());
    std::vector<std::string> ms;
    for (Method m : methods) ms.emplace_back(method_name(m));
    j["methods"] = ms;
    j["aperture_degrees"] = aperture_degrees;
    nlohmann::json snrs = nlohmann::json::array();
    for (const auto& s : snrs_db) {
        if (s)
            snrs.push_back(*s);
        else
            snrs.push_back(nullptr);
    }
    j["snrs_db"] = snrs;
    if (alpha_mlsm) j["alpha_mlsm"] = *alpha_mlsm;
    if (alpha_mf) j["alpha_mf"] = *alpha_mf;
    j["use_l_curve"] = use_l_curve;
    j["solver"] = solver == ForwardSolver::Series ? "series" : "mom";
    j["mom_cell_size_m"] = mom_cell_size;
    j["mf_mode"] = mf_mode_name(mf_mode);
    j["threshold"] = threshold.describe();
    j["out_dir"] = out_dir.string();
    j["threads"] = threads;
    return j.dump(indent);
}

ExperimentSpec ExperimentSpec::from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("experiment json parse error: ") + e.what());
    }
    try {
        ExperimentSpec spec;
        if (j.contains("scene")) spec.scene = SceneConfig::from_json_string(j.at("scene").dump());
        if (j.contains("methods")) {
            spec.methods.clear();
            for (const auto& m : j.at("methods"))
                spec.methods.push_back(method_from_string(m.get<std::string>()));
        }
        if (j.contains("aperture_degrees"))
            spec.aperture_degrees = j.at("aperture_degrees").get<std::vector<double>>();
        if (j.contains("snrs_db")) {
            spec.snrs_db.clear();
            for (const auto& s : j.at("snrs_db")) {
                if (s.is_null())
                    spec.snrs_db.push_back(std::nullopt);
                else
                    spec.snrs_db.push_back(s.get<double>());
            }
        }
        if (j.contains("alpha_mlsm") && !j.at("alpha_mlsm").is_null())
            spec.alpha_mlsm = j.at("alpha_mlsm").get<double>();
        if (j.contains("alpha_mf") && !j.at("alpha_mf").is_null())
            spec.alpha_mf = j.at("alpha_mf").get<double>();
        spec.use_l_curve = j.value("use_l_curve", false);
        if (j.contains("solver")) {
            const std::string s = j.at("solver").get<std::string>();
            if (s == "series")
                spec.solver = ForwardSolver::Series;
            else if (s == "mom")
                spec.solver = ForwardSolver::Mom;
            else
                throw ValidationError("unknown solver '" + s + "' (series|mom)");
        }
        spec.mom_cell_size = j.value("mom_cell_size_m", 0.0);
        if (j.contains("mf_mode"))
            spec.mf_mode = mf_mode_from_string(j.at("mf_mode").get<std::string>());
        if (j.contains("threshold"))
            spec.threshold = ThresholdPolicy::parse(j.at("threshold").get<std::string>());
        if (j.contains("out_dir")) spec.out_dir = j.at("out_dir").get<std::string>();
        spec.threads = j.value("threads", 0u);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("experiment json field error: ") + e.what());
    }
}

std::vector<RunConfig> expand_runs(const ExperimentSpec& spec) {
    validate_spec(spec);
    std::vector<RunConfig> runs;
    for (double deg : spec.aperture_degrees) {
        for (const auto& snr : spec.snrs_db) {
            for (Method m : spec.methods) {
                RunConfig run;
                run.method = m;
                run.aperture_degrees = deg;
                run.snr_db = snr;
                if (m == Method::MfMlsm)
                    run.alpha = spec.alpha_mf.value_or(default_alpha(m, snr));
                else
                    run.alpha = spec.alpha_mlsm.value_or(default_alpha(m, snr));
                if (!(run.alpha > 0.0))
                    throw ValidationError("alpha must be > 0 (got " +
                                          std::to_string(run.alpha) + ")");
                run.scenario = scenario_name(deg, snr);

                std::ostringstream id;
                id.precision(17);
                id << method_name(m) << '|' << deg << '|' << (snr ? *snr : -1.0) << '|'
                   << run.alpha << '|' << spec.scene.rng_seed << '|'
                   << spec.scene.geometry_hash() << '|'
                   << (spec.solver == ForwardSolver::Series ? "series" : "mom") << '|'
                   << mf_mode_name(spec.mf_mode) << '|' << spec.threshold.describe();
                run.run_id = to_hex(fnv1a(id.str()));
                runs.push_back(std::move(run));
            }
        }
    }
    return runs;
}

std::vector<std::filesystem::path> cmd_forward(const ExperimentSpec& spec) {
    validate_spec(spec);
    namespace fs = std::filesystem;
    const fs::path dir = spec.out_dir / "datasets";

    SceneConfig full = spec.scene;
    full.aperture = ApertureSelection::full(full.ring.count);
    const ScatteringDataset clean = synthesize_dataset(full, spec.solver, spec.mom_cell_size);

    std::vector<fs::path> written;
    const fs::path clean_base = dir / dataset_base_name(std::nullopt);
    save_dataset(clean_base, clean);
    written.push_back(clean_base);

    std::vector<double> distinct;
    for (const auto& snr : spec.snrs_db)
        if (snr && std::find(distinct.begin(), distinct.end(), *snr) == distinct.end())
            distinct.push_back(*snr);
    for (double snr : distinct) {
        const fs::path base = dir / dataset_base_name(snr);
        save_dataset(base, add_awgn(clean, snr, spec.scene.rng_seed));
        written.push_back(base);
    }
    return written;
}

std::vector<RunResult> cmd_invert(const ExperimentSpec& spec) {
    const std::vector<RunConfig> runs = expand_runs(spec);
    namespace fs = std::filesystem;
    const fs::path maps_dir = spec.out_dir / "maps";
    fs::create_directories(maps_dir);

    const auto truth = ground_truth_mask(spec.scene.grid, spec.scene.scatterers);

    std::vector<RunResult> results;
    results.reserve(runs.size());
    for (const RunConfig& run : runs) {
        const auto aperture =
            ApertureSelection::from_degrees(run.aperture_degrees, spec.scene.ring.count);
        const fs::path base = spec.out_dir / "datasets" / dataset_base_name(run.snr_db);
        if (!fs::exists(base.string() + ".lsmd"))
            throw ValidationError("cmd_invert: missing dataset " + base.string() +
                                  ".lsmd (run forward first)");
        const ScatteringDataset ds = load_dataset(base, aperture);
        if (ds.geometry_hash != 0 && ds.geometry_hash != spec.scene.geometry_hash())
            throw ValidationError("cmd_invert: dataset " + base.string() +
                                  " was synthesized for a different scene geometry");

        SceneConfig scene = spec.scene;
        scene.aperture = aperture;

        RunOptions options;
        options.mf_mode = spec.mf_mode;
        options.threads = spec.threads;

        double alpha = run.alpha;
        if (spec.use_l_curve || spec.scene.alpha_policy.mode == AlphaPolicy::Mode::LCurve) {
            const InversionContext ctx(ds, scene.ring, scene.grid);
            const auto grid = log_spaced(1e-8, 1e2, 44);
            alpha = select_alpha_l_curve(ctx, run.method, grid, spec.mf_mode);
            std::cerr << "[lsmkit] l-curve alpha for " << run.scenario << "/"
                      << method_name(run.method) << ": " << alpha << "\n";
            // diagnostic curve at the DOI center, middle frequency
            const std::size_t center = (scene.grid.side_pixels / 2) * scene.grid.side_pixels +
                                       scene.grid.side_pixels / 2;
            const std::size_t mid = ds.n_freq() / 2;
            const LCurveResult curve =
                l_curve_alpha(ctx.svd_at(mid), ctx.greens(center, mid), grid);
            atomic_write_file(maps_dir / (run.scenario + "_" +
                                          std::string(method_name(run.method)) + "_lcurve.csv"),
                              curve.to_csv());
        }

        std::cerr << "[lsmkit] run " << run.run_id << " " << run.scenario << " "
                  << method_name(run.method) << " alpha=" << alpha << "\n";
        const IndicatorMap map = run_method(ds, scene, run.method, alpha, options);

        const Normalized norm = normalize(map);
        if (norm.constant_input)
            std::cerr << "[lsmkit] warning: constant indicator map for " << run.scenario << "\n";
        const BinarizedMap bin = binarize(std::span{norm.values}, spec.threshold);
        ReconstructionReport report = coverage(std::span{bin.mask}, std::span{truth});
        report.threshold_used = bin.tau;
        report.method = method_name(run.method);
        report.scenario = run.scenario;

        RunResult result;
        result.run = run;
        result.run.alpha = alpha;
        result.report = report;
        const std::string stem = run.scenario + "_" + method_name(run.method);
        result.map_csv = maps_dir / (stem + ".csv");
        result.map_pgm = maps_dir / (stem + ".pgm");
        result.map_json = maps_dir / (stem + ".json");
        write_indicator_csv(result.map_csv, map);
        write_indicator_pgm(result.map_pgm, map);
        write_indicator_json(result.map_json, map);

        nlohmann::json rj = nlohmann::json::parse(report.to_json());
        rj["run_id"] = run.run_id;
        rj["alpha"] = alpha;
        rj["aperture_degrees"] = run.aperture_degrees;
        if (run.snr_db) rj["snr_db"] = *run.snr_db;
        rj["mf_mode"] = mf_mode_name(spec.mf_mode);
        atomic_write_file(maps_dir / (stem + "_report.json"), rj.dump(2) + "\n");

        results.push_back(std::move(result));
    }
    return results;
}

std::filesystem::path cmd_report(const ExperimentSpec& spec,
                                 const std::vector<RunResult>& results) {
    namespace fs = std::filesystem;
    const fs::path dir = spec.out_dir / "reports";

    // per-cell listing, one row per (method, aperture, snr)
    {
        std::ostringstream cells;
        cells << ReconstructionReport::csv_header() << ",alpha,run_id\n";
        for (const RunResult& r : results) {
            std::ostringstream alpha;
            alpha.precision(17);
            alpha << r.run.alpha;
            cells << r.report.to_csv_row() << ',' << alpha.str() << ',' << r.run.run_id << '\n';
        }
        atomic_write_file(dir / "cells.csv", cells.str());
    }

    // side-by-side table, one row per setting
    std::vector<std::string> scenarios;
    for (const RunResult& r : results)
        if (std::find(scenarios.begin(), scenarios.end(), r.run.scenario) == scenarios.end())
            scenarios.push_back(r.run.scenario);

    auto find_cov = [&](const std::string& scenario, Method m) -> std::optional<double> {
        for (const RunResult& r : results)
            if (r.run.scenario == scenario && r.run.method == m) return r.report.coverage_percent;
        return std::nullopt;
    };

    std::ostringstream table;
    table << "setting,MLSM_percent,MF_MLSM_percent\n";
    table.precision(10);
    std::ostringstream console;
    console << "Setting              MLSM(%)   MF-MLSM(%)\n";
    for (const std::string& s : scenarios) {
        const auto ml = find_cov(s, Method::MlsmParallel);
        const auto mf = find_cov(s, Method::MfMlsm);
        table << s << ',';
        if (ml) table << *ml;
        table << ',';
        if (mf) table << *mf;
        table << '\n';
        char line[128];
        std::snprintf(line, sizeof line, "%-20s %8.2f %11.2f\n", s.c_str(), ml.value_or(-1.0),
                      mf.value_or(-1.0));
        console << line;
    }
    const fs::path table_path = dir / "table1.csv";
    atomic_write_file(table_path, table.str());
    std::cerr << console.str();

    // provenance
    nlohmann::json summary;
    summary["spec"] = nlohmann::json::parse(spec.to_json_string());
    summary["cells"] = nlohmann::json::array();
    for (const RunResult& r : results) {
        nlohmann::json c = nlohmann::json::parse(r.report.to_json());
        c["run_id"] = r.run.run_id;
        c["alpha"] = r.run.alpha;
        summary["cells"].push_back(c);
    }
    atomic_write_file(dir / "summary.json", summary.dump(2) + "\n");
    return table_path;
}

std::filesystem::path cmd_report_from_dir(const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    const fs::path maps_dir = spec.out_dir / "maps";
    if (!fs::exists(maps_dir))
        throw ValidationError("cmd_report: no maps directory at " + maps_dir.string() +
                              " (run invert first)");
    std::vector<fs::path> report_files;
    for (const auto& entry : fs::directory_iterator(maps_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 12 && name.rfind("_report.json") == name.size() - 12)
            report_files.push_back(entry.path());
    }
    std::sort(report_files.begin(), report_files.end());
    if (report_files.empty())
        throw ValidationError("cmd_report: no run reports found under " + maps_dir.string());

    std::vector<RunResult> results;
    for (const fs::path& p : report_files) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(p));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(p.string() + ": bad report json: " + e.what());
        }
        RunResult r;
        r.report.scenario = j.value("scenario", "");
        r.report.method = j.value("method", "");
        r.report.coverage_percent = j.value("coverage_percent", 0.0);
        r.report.true_positive_pixels = j.value("true_positive_pixels", std::size_t{0});
        r.report.false_positive_pixels = j.value("false_positive_pixels", std::size_t{0});
        r.report.truth_pixels = j.value("truth_pixels", std::size_t{0});
        r.report.threshold_used = j.value("threshold_used", 0.0);
        r.run.method = method_from_string(r.report.method);
        r.run.scenario = r.report.scenario;
        r.run.alpha = j.value("alpha", 0.0);
        r.run.run_id = j.value("run_id", "");
        if (j.contains("snr_db")) r.run.snr_db = j.at("snr_db").get<double>();
        r.run.aperture_degrees = j.value("aperture_degrees", 0.0);
        results.push_back(std::move(r));
    }
    return cmd_report(spec, results);
}

ReproduceResult reproduce_paper(const ExperimentSpec& user_spec) {
    ExperimentSpec spec = user_spec;
    spec.aperture_degrees = {180.0, 144.0};
    spec.snrs_db = {std::optional<double>{27.0}, std::optional<double>{12.0}};
    spec.methods = {Method::MlsmParallel, Method::MfMlsm};

    ExperimentSpec fig6 = spec;
    fig6.aperture_degrees = {93.6};
    fig6.snrs_db = {std::optional<double>{27.0}};

    cmd_forward(spec);
    ReproduceResult out;
    out.table_cells = cmd_invert(spec);
    out.fig6_cells = cmd_invert(fig6);

    std::vector<RunResult> all = out.table_cells;
    all.insert(all.end(), out.fig6_cells.begin(), out.fig6_cells.end());
    out.table_csv = cmd_report(spec, all);

    // table1_cells.csv: the eight coverage-table cells
    std::ostringstream cells;
    cells << ReconstructionReport::csv_header() << ",alpha,run_id\n";
    for (const RunResult& r : out.table_cells) {
        std::ostringstream alpha;
        alpha.precision(17);
        alpha << r.run.alpha;
        cells << r.report.to_csv_row() << ',' << alpha.str() << ',' << r.run.run_id << '\n';
    }
    atomic_write_file(spec.out_dir / "reports" / "table1_cells.csv", cells.str());

    // fig6.csv: the two 93.6-degree cells and the method gap
    std::ostringstream f6;
    f6 << ReconstructionReport::csv_header() << ",alpha,run_id\n";
    double cov_ml = 0.0, cov_mf = 0.0;
    for (const RunResult& r : out.fig6_cells) {
        std::ostringstream alpha;
        alpha.precision(17);
        alpha << r.run.alpha;
        f6 << r.report.to_csv_row() << ',' << alpha.str() << ',' << r.run.run_id << '\n';
        if (r.run.method == Method::MlsmParallel) cov_ml = r.report.coverage_percent;
        if (r.run.method == Method::MfMlsm) cov_mf = r.report.coverage_percent;
    }
    f6 << "# coverage_gap," << std::abs(cov_mf - cov_ml) << '\n';
    atomic_write_file(spec.out_dir / "reports" / "fig6.csv", f6.str());
    return out;
}

} // namespace lsm
