#include "distmon/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "distmon/config.hpp"
#include "distmon/density.hpp"
#include "distmon/error.hpp"
#include "distmon/geometry.hpp"
#include "distmon/ingest.hpp"
#include "distmon/log.hpp"
#include "distmon/monitor.hpp"
#include "distmon/report.hpp"
#include "distmon/scene.hpp"
#include "distmon/simulate.hpp"

namespace distmon::cli {
namespace {

/// Config and usage problems map to exit status 2.
class UsageError : public Error {
public:
    using Error::Error;
};

SceneConfig load_scene_file(const std::string& path) {
    try {
        return load_scene(read_file(path));
    } catch (const ParseError& e) {
        throw UsageError(path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw UsageError(path + ": " + e.what());
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

std::vector<Correspondence> load_pairs(const std::string& path) {
    const std::string text = [&] {
        try {
            return read_file(path);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }();
    std::vector<Correspondence> pairs;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto v = parse_numbers({line_no, "pair", line});
        if (v.size() != 4) throw UsageError(path + ": line " + std::to_string(line_no) + ": expected 'u v x y'");
        pairs.push_back({{v[0], v[1]}, {v[2], v[3]}});
    }
    return pairs;
}

int run_calibrate(const std::string& pairs_path, const std::string& out_path, std::ostream& out) {
    const auto pairs = load_pairs(pairs_path);
    Homography h;
    try {
        h = estimate_homography(pairs);
    } catch (const DegenerateConfiguration& e) {
        throw UsageError(e.what());
    }
    double sq = 0.0;
    for (const auto& c : pairs) {
        const auto p = world_to_image(h, c.world);
        sq += (p.x - c.image.x) * (p.x - c.image.x) + (p.y - c.image.y) * (p.y - c.image.y);
    }
    const std::string rms = format_double(std::sqrt(sq / static_cast<double>(pairs.size())));
    const std::string text = format_homography_section(h);
    log::info("calibrated from " + std::to_string(pairs.size()) + " pairs, rms reprojection " + rms + " px");
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(out_path);
        if (!f) throw Error("cannot write '" + out_path + "'");
        f << text;
    }
    return kSuccess;
}

int run_simulate(const std::string& config_path, std::uint64_t seed, const std::string& truth_path,
                 std::ostream& out) {
    SimConfig cfg = [&] {
        try {
            return load_sim_config(ConfigDocument::parse(read_file(config_path)));
        } catch (const Error& e) {
            throw UsageError(config_path + ": " + e.what());
        }
    }();
    cfg.seed = seed;

    std::ofstream truth;
    if (!truth_path.empty()) {
        truth.open(truth_path);
        if (!truth) throw Error("cannot write '" + truth_path + "'");
    }
    Simulator sim(std::move(cfg));
    while (auto f = sim.next()) {
        out << serialize_frame(f->frame) << '\n';
        if (truth.is_open()) truth << serialize_truth(*f) << '\n';
    }
    return kSuccess;
}

std::optional<double> rho_c_from_fit(const std::string& path) {
    try {
        const FitReport r = parse_fit_report(read_file(path));
        if (!r.rho_c) throw UsageError(path + ": fit report has no critical density (status " + r.status + ")");
        return r.rho_c;
    } catch (const UsageError&) {
        throw;
    } catch (const Error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

int run_monitor(const std::string& scene_path, std::optional<double> rho_c, const std::string& fit_path,
                bool lenient, std::istream& in, std::ostream& out) {
    auto scene = std::make_shared<const SceneConfig>(load_scene_file(scene_path));
    if (!fit_path.empty()) rho_c = rho_c_from_fit(fit_path);

    Monitor monitor(scene, rho_c);
    FrameReader reader(in, lenient ? ParseMode::lenient : ParseMode::strict);
    while (auto frame = reader.next()) {
        out << serialize_assessment(monitor.process(*frame)) << '\n';
        out.flush();
    }
    log::info("processed " + std::to_string(monitor.frames_processed()) + " frames; skipped " +
              std::to_string(reader.skipped()) + " records; dropped " +
              std::to_string(monitor.dropped_at_infinity()) + " at horizon, " +
              std::to_string(monitor.dropped_outside_roi()) + " outside ROI");
    return kSuccess;
}

int run_fit_density(const std::string& scene_path, std::optional<double> level, bool lenient,
                    const std::string& out_path, std::istream& in, std::ostream& out) {
    auto scene = std::make_shared<const SceneConfig>(load_scene_file(scene_path));
    const double lvl = level.value_or(1.0 - scene->violation_budget_u0);
    if (!(lvl > 0.0 && lvl < 1.0)) throw UsageError("--level must lie in (0, 1)");

    Monitor monitor(scene);
    FitAccumulator acc;
    FrameReader reader(in, lenient ? ParseMode::lenient : ParseMode::strict);
    while (auto frame = reader.next()) monitor.fit(*frame, acc);

    FitReport report;
    report.level = lvl;
    report.fit = fit_ols(acc.samples());
    std::vector<double> rhos;
    rhos.reserve(acc.size());
    for (const auto& s : acc.samples()) rhos.push_back(s.rho);
    try {
        report.rho_skewness = skewness(rhos);
    } catch (const ZeroVariance&) {
    }
    try {
        const CriticalDensity cd = critical_density(report.fit, lvl);
        report.rho_c = cd.rho_c;
        report.status = std::string(to_string(cd.status));
        if (cd.status == CriticalStatus::already_violating)
            log::warn("lower prediction bound is non-negative at zero density; rho_c = 0");
    } catch (const NonPositiveSlope& e) {
        report.status = "non_positive_slope";
        log::warn(e.what());
    }

    const std::string text = serialize_fit_report(report) + "\n";
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(out_path);
        if (!f) throw Error("cannot write '" + out_path + "'");
        f << text;
    }
    return kSuccess;
}

int run_report(const std::string& input, const std::string& out_dir, std::size_t bins, std::istream& in) {
    if (bins == 0) throw UsageError("--bins must be >= 1");
    std::ifstream file;
    std::istream* src = &in;
    if (input != "-") {
        file.open(input);
        if (!file) throw UsageError("cannot open '" + input + "'");
        src = &file;
    }
    std::vector<FrameAssessment> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(*src, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            rows.push_back(parse_assessment(line));
        } catch (const MalformedRecord& e) {
            throw MalformedRecord("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    write_report_files(out_dir, rows, bins);
    return kSuccess;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    log::set_sink(&err);
    struct SinkReset {
        ~SinkReset() { log::set_sink(nullptr); }
    } reset;

    CLI::App app{"Social-distancing monitor: ground-plane proximity, density and critical-density estimation",
                 "distmon"};
    app.require_subcommand(1);

    std::string pairs_path, out_path;
    auto* calibrate = app.add_subcommand("calibrate", "Estimate the world->image homography from point pairs");
    calibrate->add_option("--pairs", pairs_path, "File of 'u v x y' lines (pixel, meters)")->required();
    calibrate->add_option("-o,--output", out_path, "Write the [homography] section here instead of stdout");

    std::string config_path, truth_path;
    std::uint64_t seed = 0;
    auto* simulate = app.add_subcommand("simulate", "Emit synthetic detection frames");
    simulate->add_option("--config", config_path, "Simulation config")->required();
    simulate->add_option("--seed", seed, "Random seed")->required();
    simulate->add_option("--truth", truth_path, "Also write ground-truth positions here");

    std::string scene_path, fit_path;
    std::optional<double> rho_c;
    bool strict = false, lenient = false;
    auto* monitor = app.add_subcommand("monitor", "Assess frames from stdin without retaining them");
    monitor->add_option("--scene", scene_path, "Scene config")->required();
    auto* rho_opt = monitor->add_option("--rho-c", rho_c, "Critical density (persons/m^2)");
    monitor->add_option("--fit", fit_path, "Fit report providing rho_c")->excludes(rho_opt);
    monitor->add_flag("--strict", strict, "Abort on malformed records (default)");
    monitor->add_flag("--lenient", lenient, "Skip malformed records and count them");

    std::optional<double> level;
    std::string fit_out;
    auto* fit = app.add_subcommand("fit-density", "Fit the density regression and critical density");
    fit->add_option("--scene", scene_path, "Scene config")->required();
    fit->add_option("--level", level, "Prediction interval level (default 1 - u0)");
    fit->add_flag("--strict", strict, "Abort on malformed records (default)");
    fit->add_flag("--lenient", lenient, "Skip malformed records and count them");
    fit->add_option("-o,--output", fit_out, "Write the report here instead of stdout");

    std::string input, out_dir;
    std::size_t bins = kDefaultBins;
    auto* report = app.add_subcommand("report", "Write time series and histogram CSVs from assessment records");
    report->add_option("--input", input, "Assessment records ('-' for stdin)")->required();
    report->add_option("--out-dir", out_dir, "Output directory")->required();
    report->add_option("--bins", bins, "Bins per histogram axis");

    std::vector<std::string> argv_storage{"distmon"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "distmon: usage: " << e.what() << '\n';
        return kUsageError;
    }
    if (strict && lenient) {
        err << "distmon: usage: --strict and --lenient are mutually exclusive\n";
        return kUsageError;
    }

    try {
        if (calibrate->parsed()) return run_calibrate(pairs_path, out_path, out);
        if (simulate->parsed()) return run_simulate(config_path, seed, truth_path, out);
        if (monitor->parsed()) return run_monitor(scene_path, rho_c, fit_path, lenient, in, out);
        if (fit->parsed()) return run_fit_density(scene_path, level, lenient, fit_out, in, out);
        if (report->parsed()) return run_report(input, out_dir, bins, in);
    } catch (const UsageError& e) {
        err << "distmon: config: " << e.what() << '\n';
        return kUsageError;
    } catch (const ValidationError& e) {
        err << "distmon: config: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "distmon: error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}

}  // namespace distmon::cli
