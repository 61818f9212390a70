#include <catch2/catch.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "dcl/io.hpp"

// End-to-end checks of the dcl binary: exit codes, determinism, atomicity.

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

RunResult run_cli(const std::string& args, const fs::path& workdir) {
    fs::create_directories(workdir);
    const fs::path out = workdir / "stdout.txt";
    const fs::path err = workdir / "stderr.txt";
    const std::string cmd = "cd '" + workdir.string() + "' && '" + DCL_CLI_PATH + "' " +
                            args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dcl_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) {
    dcl::atomic_write_file(p.string(), text);
}

bool has_tmp_leftovers(const fs::path& dir) {
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.path().extension() == ".tmp") return true;
    return false;
}

const char* kSmallLattice = R"({
  "kind": "gyroid", "cell_size_mm": 8.0, "level": 0.0, "shell_halfwidth": 0.4,
  "domain": {"inner_radius_mm": 10, "outer_radius_mm": 16,
             "angular_span_deg": [30, 90], "thickness_mm": 6},
  "resolution": 16
})";

}  // namespace

TEST_CASE("every subcommand answers --help with exit 0") {
    const fs::path dir = fresh_dir("help");
    for (const std::string cmd :
         {"--help", "lattice --help", "lattice gen --help", "stiffness fit --help",
          "jump sim --help", "mechanism sweep --help", "mocap synth --help",
          "mocap analyze --help", "pipeline table1 --help"}) {
        RunResult r = run_cli(cmd, dir);
        INFO(cmd);
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("Usage") != std::string::npos);
    }
}

TEST_CASE("unknown flags exit 2 without side effects") {
    const fs::path dir = fresh_dir("unknown_flag");
    RunResult r = run_cli("lattice gen --no-such-flag -o out", dir);
    CHECK(r.exit_code == 2);
    CHECK_FALSE(fs::exists(dir / "out"));

    RunResult r2 = run_cli("frobnicate", dir);
    CHECK(r2.exit_code == 2);
}

TEST_CASE("missing referenced input files exit 2") {
    const fs::path dir = fresh_dir("missing_config");
    RunResult r = run_cli("lattice gen -c does_not_exist.json", dir);
    CHECK(r.exit_code == 2);

    write(dir / "p.json", R"({"stiffness": {"csv": "no_such_sweep.csv"}})");
    RunResult r2 = run_cli("pipeline table1 -c p.json -o out", dir);
    CHECK(r2.exit_code == 2);
    CHECK(r2.err.find("no_such_sweep.csv") != std::string::npos);
}

TEST_CASE("validation failures exit 2 and name the offending field") {
    const fs::path dir = fresh_dir("bad_density");
    write(dir / "bad.json", R"({"kind": "gyroid", "target_density": 1.5})");
    RunResult r = run_cli("lattice gen -c bad.json -o out", dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("target_density") != std::string::npos);

    write(dir / "badkind.json", R"({"kind": "voronoi"})");
    RunResult r2 = run_cli("lattice gen -c badkind.json -o out", dir);
    CHECK(r2.exit_code == 2);
    CHECK(r2.err.find("voronoi") != std::string::npos);
}

TEST_CASE("deployed jump without a stiffness source exits 2") {
    const fs::path dir = fresh_dir("no_stiffness");
    write(dir / "jump.json", R"({"scenario": {"mode": "deployed"}})");
    RunResult r = run_cli("jump sim -c jump.json", dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("stiffness") != std::string::npos);
}

TEST_CASE("lattice output is byte-identical across runs and worker counts") {
    const fs::path dir = fresh_dir("lattice_determinism");
    write(dir / "lat.json", kSmallLattice);

    setenv("DCL_THREADS", "1", 1);
    REQUIRE(run_cli("lattice gen -c lat.json -o a --seed 3", dir).exit_code == 0);
    setenv("DCL_THREADS", "5", 1);
    REQUIRE(run_cli("lattice gen -c lat.json -o b --seed 3", dir).exit_code == 0);
    unsetenv("DCL_THREADS");

    const std::string stl_a = slurp(dir / "a" / "lattice.stl");
    const std::string stl_b = slurp(dir / "b" / "lattice.stl");
    REQUIRE(!stl_a.empty());
    CHECK(stl_a == stl_b);
    CHECK(slurp(dir / "a" / "lattice_report.json") ==
          slurp(dir / "b" / "lattice_report.json"));
    CHECK_FALSE(has_tmp_leftovers(dir));
}

TEST_CASE("pipeline artifacts are byte-identical across reruns") {
    const fs::path dir = fresh_dir("pipeline_determinism");
    setenv("DCL_THREADS", "2", 1);
    REQUIRE(run_cli("pipeline table1 --seed 7 -o a", dir).exit_code == 0);
    setenv("DCL_THREADS", "8", 1);
    REQUIRE(run_cli("pipeline table1 --seed 7 -o b", dir).exit_code == 0);
    unsetenv("DCL_THREADS");

    for (const char* f : {"table1.csv", "table1.txt", "pipeline_report.json",
                          "stiffness_model.json", "trajectory_deployed.csv"}) {
        INFO(f);
        const std::string a = slurp(dir / "a" / f);
        REQUIRE(!a.empty());
        CHECK(a == slurp(dir / "b" / f));
    }
    CHECK_FALSE(has_tmp_leftovers(dir));
}

TEST_CASE("shipped pipeline reproduces the published rows") {
    const fs::path dir = fresh_dir("pipeline_rows");
    RunResult r = run_cli("pipeline table1 --seed 7 -o out", dir);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("373.1") != std::string::npos);
    CHECK(r.out.find("371.7") != std::string::npos);
    CHECK(r.out.find("-0.4%") != std::string::npos);
    CHECK(r.out.find("+17.1%") != std::string::npos);  // published value, side by side
    CHECK(r.out.find("[+10.0%, +25.0%]") != std::string::npos);
}

TEST_CASE("lattice flags mirror the JSON keys") {
    const fs::path dir = fresh_dir("lattice_flags");
    RunResult r = run_cli(
        "lattice gen --kind gyroid --cell-size-mm 8 --shell-halfwidth 0.4 "
        "--resolution 16 --inner-radius-mm 10 --outer-radius-mm 16 --thickness-mm 6 "
        "--angular-span-deg 30 90 -o out",
        dir);
    REQUIRE(r.exit_code == 0);
    const std::string report = slurp(dir / "out" / "lattice_report.json");
    CHECK(report.find("\"volume_fraction\"") != std::string::npos);
    CHECK(report.find("\"triangle_count\"") != std::string::npos);
    CHECK(fs::file_size(dir / "out" / "lattice.stl") > 84);
}

TEST_CASE("mocap analyze guards its inputs") {
    const fs::path dir = fresh_dir("mocap_guards");
    fs::create_directories(dir / "empty");
    write(dir / "cfg_empty.json", R"({"trials_dir": "empty"})");
    RunResult r = run_cli("mocap analyze -c cfg_empty.json", dir);
    CHECK(r.exit_code == 2);

    REQUIRE(run_cli("mocap synth --trials 1 -o one --seed 9", dir).exit_code == 0);
    // keep only the single trial CSV
    write(dir / "cfg_one.json", R"({"trials_dir": "one_csv"})");
    fs::create_directories(dir / "one_csv");
    fs::copy_file(dir / "one" / "trial_01.csv", dir / "one_csv" / "trial_01.csv");
    RunResult r2 = run_cli("mocap analyze -c cfg_one.json", dir);
    CHECK(r2.exit_code == 2);
    CHECK(r2.err.find(">= 2 trials") != std::string::npos);
}

TEST_CASE("mocap synth then analyze recovers the ground truth") {
    const fs::path dir = fresh_dir("mocap_e2e");
    REQUIRE(run_cli("mocap synth -o data --seed 11", dir).exit_code == 0);
    write(dir / "cfg.json",
          R"({"trials_dir": "data", "h_base_mm": 283.1, "smoothing_window": 5,
              "baseline_mean_mm": 373.1})");
    RunResult r = run_cli("mocap analyze -c cfg.json -o out", dir);
    REQUIRE(r.exit_code == 0);

    // aggregate mean within 0.5 mm of the generator's 373.2 mm
    const std::string agg = slurp(dir / "out" / "mocap_aggregate.csv");
    REQUIRE(!agg.empty());
    const auto line = agg.substr(agg.find('\n') + 1);
    const auto fields = dcl::split_csv_line(line.substr(0, line.find('\n')));
    REQUIRE(fields.size() >= 5);
    CHECK(std::stod(fields[0]) == 5);
    CHECK(std::stod(fields[1]) == Approx(373.2).margin(0.5));
    CHECK_FALSE(has_tmp_leftovers(dir));
}
