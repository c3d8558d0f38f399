#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "distmon/cli.hpp"
#include "distmon/density.hpp"
#include "distmon/report.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using distmon::cli::dispatch;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    const int code = dispatch(args, in, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const {
        std::ofstream(path / name) << content;
        return (path / name).string();
    }
};

const std::string kExamples = std::string(DISTMON_SOURCE_DIR) + "/config/";

std::string snapshot(const fs::path& dir) {
    std::string listing;
    for (const auto& e : fs::recursive_directory_iterator(dir)) listing += e.path().string() + "\n";
    return listing;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"monitor"}).code == 2);
    CHECK(run({"monitor", "--scene", "x", "--rho-c", "0.1", "--fit", "y"}).code == 2);
    CHECK(run({"monitor", "--scene", "/nonexistent/scene.cfg"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("calibrate prints a homography from 4 correspondences") {
    TempDir tmp("distmon_cli_calibrate");
    const auto pairs = tmp.file("pairs.txt",
                                "# u v x y\n100 400 0 0\n500 400 4 0\n450 200 4 6\n150 200 0 6\n");
    const auto r = run({"calibrate", "--pairs", pairs});
    CHECK(r.code == 0);
    CHECK(r.out.find("[homography]") == 0);
    const auto scene = distmon::load_scene(r.out + "[roi]\nvertex=0 0\nvertex=4 0\nvertex=4 6\nvertex=0 6\n");
    const auto w = distmon::image_to_world(scene.homography, {450, 200});
    CHECK(w.x == doctest::Approx(4.0));
    CHECK(w.y == doctest::Approx(6.0));

    const auto few = tmp.file("few.txt", "100 400 0 0\n500 400 4 0\n");
    CHECK(run({"calibrate", "--pairs", few}).code == 2);
    const auto out_path = (tmp.path / "h.cfg").string();
    CHECK(run({"calibrate", "--pairs", pairs, "-o", out_path}).code == 0);
    CHECK(fs::exists(out_path));
}

TEST_CASE("monitor with d_c = 0 exits 2") {
    TempDir tmp("distmon_cli_dc0");
    const auto scene = tmp.file("scene.cfg",
                                "[homography]\nm = 1 0 0 0 1 0 0 0 1\n[roi]\nvertex=0 0\nvertex=10 0\nvertex=0 10\n"
                                "[scene]\nd_c = 0\n");
    const auto r = run({"monitor", "--scene", scene}, "");
    CHECK(r.code == 2);
    CHECK(r.err.find("d_c") != std::string::npos);
}

TEST_CASE("monitor streams one assessment per frame") {
    TempDir tmp("distmon_cli_monitor");
    const auto scene = tmp.file("scene.cfg",
                                "[homography]\nm = 1 0 0 0 1 0 0 0 1\n[roi]\nvertex=0 0\nvertex=100 0\n"
                                "vertex=100 100\nvertex=0 100\n");
    const std::string frames =
        R"({"frame": 0, "t": 0, "detections": [{"label": "person", "score": 0.9, "bbox": [5, 0, 15, 10]}, {"label": "person", "score": 0.9, "bbox": [6, 0, 16, 10]}]})"
        "\n"
        R"({"frame": 1, "t": 0.04, "detections": []})"
        "\n";
    const auto r = run({"monitor", "--scene", scene, "--rho-c", "0.0001"}, frames);
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    const auto a = distmon::parse_assessment(line);
    CHECK(a.n == 2);
    CHECK(a.v == 2);
    CHECK(a.c1);
    CHECK(a.c2);
    std::getline(lines, line);
    CHECK(distmon::parse_assessment(line).n == 0);

    const std::string bad = frames + "{\"frame\": 2, \"t\": 1, \"detections\": [{\"label\": \"person\"}]}\n";
    CHECK(run({"monitor", "--scene", scene}, bad).code == 1);
    const auto lenient = run({"monitor", "--scene", scene, "--lenient"}, bad);
    CHECK(lenient.code == 0);
    CHECK(std::count(lenient.out.begin(), lenient.out.end(), '\n') == 2);
    CHECK(run({"monitor", "--scene", scene, "--strict", "--lenient"}, frames).code == 2);

    const std::string backwards = R"({"frame": 3, "t": 0, "detections": []})"
                                  "\n"
                                  R"({"frame": 2, "t": 0, "detections": []})"
                                  "\n";
    CHECK(run({"monitor", "--scene", scene}, backwards).code == 1);
}

TEST_CASE("simulate | fit-density | monitor --fit pipeline is deterministic") {
    TempDir tmp("distmon_cli_pipeline");
    const auto sim_cfg = kExamples + "simulation.cfg";
    const auto scene = kExamples + "scene.cfg";

    const auto sim1 = run({"simulate", "--config", sim_cfg, "--seed", "7"});
    const auto sim2 = run({"simulate", "--config", sim_cfg, "--seed", "7"});
    REQUIRE(sim1.code == 0);
    CHECK(sim1.out == sim2.out);
    CHECK(run({"simulate", "--config", sim_cfg, "--seed", "8"}).out != sim1.out);

    const auto fit1 = run({"fit-density", "--scene", scene}, sim1.out);
    const auto fit2 = run({"fit-density", "--scene", scene}, sim1.out);
    REQUIRE(fit1.code == 0);
    CHECK(fit1.out == fit2.out);
    const auto report = distmon::parse_fit_report(fit1.out);
    REQUIRE(report.status == "ok");
    REQUIRE(report.rho_c.has_value());
    CHECK(report.level == doctest::Approx(0.95));

    // Cross-check rho_c against a grid scan of the reported band.
    const distmon::PredictionBand band(report.fit, report.level);
    const auto grid = oracle::grid_first_crossing([&](double r) { return band.lower(r); }, 1e-6,
                                                  10 * report.fit.rho_max);
    REQUIRE(grid.has_value());
    CHECK(std::abs(*grid - *report.rho_c) <= 1e-6);
    // Frozen from the first run of this pipeline (seed 7), after the grid check above passed.
    CHECK(*report.rho_c == doctest::Approx(0.044072802490281934).epsilon(1e-9));
    CHECK(report.fit.n_samples == 1500);

    const auto fit_path = tmp.file("fit.json", fit1.out);
    const auto mon = run({"monitor", "--scene", scene, "--fit", fit_path}, sim1.out);
    REQUIRE(mon.code == 0);
    std::istringstream lines(mon.out);
    std::string line;
    std::size_t c2 = 0, rows = 0;
    while (std::getline(lines, line)) {
        const auto a = distmon::parse_assessment(line);
        c2 += a.c2;
        CHECK(a.c2 == (a.rho > *report.rho_c));
        ++rows;
    }
    CHECK(rows == 1500);

    const auto no_rho = tmp.file("none.json", R"({"beta0":1,"beta1":-1,"s":1,"n":10,"rho_mean":0.1,"s_xx":1,)"
                                              R"("r_squared":0.5,"rho_c":null,"level":0.95,"status":"non_positive_slope"})");
    CHECK(run({"monitor", "--scene", scene, "--fit", no_rho}, sim1.out).code == 2);
}

TEST_CASE("report writes the three CSVs") {
    TempDir tmp("distmon_cli_report");
    const auto sim = run({"simulate", "--config", kExamples + "simulation.cfg", "--seed", "3"});
    const auto mon = run({"monitor", "--scene", kExamples + "scene.cfg"}, sim.out);
    const auto input = tmp.file("assessments.jsonl", mon.out);
    const auto out_dir = (tmp.path / "out").string();
    CHECK(run({"report", "--input", input, "--out-dir", out_dir, "--bins", "12"}).code == 0);
    for (const char* f : {"timeseries.csv", "hist_rho_davg.csv", "hist_rho_v.csv"}) CHECK(fs::exists(fs::path(out_dir) / f));
    CHECK(run({"report", "--input", input, "--out-dir", out_dir, "--bins", "0"}).code == 2);
}

TEST_CASE("the monitor binary creates no files") {
    TempDir tmp("distmon_cli_privacy");
    const auto frames = tmp.path / "frames.jsonl";
    const auto work = tmp.path / "work";
    fs::create_directories(work);
    std::string cmd = std::string("cd '") + work.string() + "' && '" + DISTMON_BINARY + "' simulate --config '" +
                      kExamples + "simulation.cfg' --seed 1 > '" + frames.string() + "'";
    REQUIRE(std::system(cmd.c_str()) == 0);

    const std::string before = snapshot(tmp.path);
    cmd = std::string("cd '") + work.string() + "' && DISTMON_LOG=debug '" + DISTMON_BINARY +
          "' monitor --scene '" + kExamples + "scene.cfg' --rho-c 0.05 < '" + frames.string() + "' > /dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(snapshot(tmp.path) == before);
    CHECK(fs::is_empty(work));
}
