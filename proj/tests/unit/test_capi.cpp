#include <doctest.h>

#include "cli.hpp"
#include "ncamaps.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ncamaps-capi-" + name);
    fs::remove_all(dir);
    return dir;
}

struct CliResult {
    int code;
    std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "ncamaps");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("version, presets and pipelines") {
    CHECK(std::string(ncm_version()).size() > 0);
    REQUIRE(ncm_preset_count() == 3);
    CHECK(std::string(ncm_preset_name(0)) == "fig2");
    CHECK(ncm_preset_name(3) == nullptr);
    CHECK(ncm_pipeline_count() == 5);
    CHECK(std::string(ncm_status_string(NCM_ERR_CONFIG)) == "configuration error");
}

TEST_CASE("config lifecycle and error reporting") {
    ncm_config* c = nullptr;
    REQUIRE(ncm_config_new(&c) == NCM_OK);
    CHECK(ncm_config_validate(c) == NCM_ERR_CONFIG);
    CHECK(std::string(ncm_last_error()).find("bath.alpha") == 0);
    CHECK(ncm_config_set(c, "alpha", "0.1") == NCM_OK);
    CHECK(ncm_config_validate(c) == NCM_OK);
    CHECK(ncm_config_set(c, "grid.warp", "9") == NCM_ERR_CONFIG);
    CHECK(std::string(ncm_last_error()) == "grid.warp: unknown key");
    CHECK(ncm_config_set(c, "dt", "-0.1") == NCM_OK);
    CHECK(ncm_config_validate(c) == NCM_ERR_CONFIG);
    CHECK(std::string(ncm_last_error()).find("grid.dt") == 0);

    size_t needed = 0;
    REQUIRE(ncm_config_to_text(c, nullptr, 0, &needed) == NCM_OK);
    std::string text(needed, '\0');
    char tiny[4];
    CHECK(ncm_config_to_text(c, tiny, sizeof tiny, &needed) == NCM_ERR_INVALID_ARGUMENT);
    REQUIRE(ncm_config_to_text(c, text.data(), text.size(), &needed) == NCM_OK);
    CHECK(text.find("grid.dt = -0.1") != std::string::npos);
    ncm_config_free(c);

    CHECK(ncm_config_new(nullptr) == NCM_ERR_INVALID_ARGUMENT);
    CHECK(ncm_config_from_preset("nope", &c) == NCM_ERR_CONFIG);
    CHECK(ncm_config_from_file("/nonexistent.cfg", &c) == NCM_ERR_CONFIG);
    CHECK(ncm_config_from_string("alpha = 0.2\n[model]\ndelta = x\n", &c) == NCM_ERR_CONFIG);
    CHECK(std::string(ncm_last_error()).find("model.delta") == 0);
    REQUIRE(ncm_config_from_preset("fig2", &c) == NCM_OK);
    ncm_config_free(c);
    ncm_config_free(nullptr);
}

TEST_CASE("run through the C API") {
    const auto dir = fresh_dir("run");
    ncm_config* c = nullptr;
    REQUIRE(ncm_config_from_string("alpha = 0.1, 0.4\nmethods = born_markov\nt_max = 300\n", &c) == NCM_OK);
    REQUIRE(ncm_config_set(c, "output.directory", dir.c_str()) == NCM_OK);
    ncm_manifest* m = nullptr;
    CHECK(ncm_run("figures", c, 1, &m) == NCM_ERR_INVALID_ARGUMENT);
    REQUIRE(ncm_run("dynamics", c, 2, &m) == NCM_OK);
    CHECK(ncm_manifest_exit_code(m) == 2);
    REQUIRE(ncm_manifest_run_count(m) == 2);
    CHECK(std::string(ncm_manifest_run_id(m, 1)) == "born_markov/alpha=0.4");
    CHECK(std::string(ncm_manifest_run_status(m, 0)) == "completed");
    CHECK(std::string(ncm_manifest_run_status(m, 1)).find("diverged at t=") == 0);
    CHECK(ncm_manifest_file_count(m) == 3);
    CHECK(fs::exists(dir / ncm_manifest_file(m, 0)));
    CHECK(std::string(ncm_manifest_text(m)).find("exit_code = 2") != std::string::npos);
    CHECK(fs::path(ncm_manifest_directory(m)) == dir);
    CHECK(ncm_manifest_run_id(m, 2) == nullptr);
    ncm_manifest_free(m);
    ncm_config_free(c);
    fs::remove_all(dir);
}

TEST_CASE("single solve through the C API") {
    ncm_trajectory* t = nullptr;
    REQUIRE(ncm_solve(NCM_METHOD_NCA, 0.1, 0.0, 0.0, 0.1, 10.0, &t) == NCM_OK);
    CHECK(ncm_trajectory_status(t) == NCM_SOLVE_COMPLETED);
    const size_t n = ncm_trajectory_size(t);
    REQUIRE(n == 101);
    std::vector<double> time(n), sz(n);
    REQUIRE(ncm_trajectory_expectations(t, time.data(), nullptr, sz.data(), n) == NCM_OK);
    CHECK(time[100] == doctest::Approx(10.0));
    CHECK(sz[100] == doctest::Approx(-std::cos(0.1 * 2 * std::numbers::pi * 10.0)).epsilon(1e-10));
    ncm_trajectory_free(t);

    REQUIRE(ncm_solve(NCM_METHOD_BORN_MARKOV, 0.1, 0.0, 0.4, 0.1, 300.0, &t) == NCM_OK);
    CHECK(ncm_trajectory_status(t) == NCM_SOLVE_DIVERGED);
    CHECK(ncm_trajectory_failure_time(t) > 0.0);
    ncm_trajectory_free(t);

    CHECK(ncm_solve(static_cast<ncm_method>(7), 0.1, 0.0, 0.1, 0.1, 1.0, &t) == NCM_ERR_INVALID_ARGUMENT);
    CHECK(ncm_solve(NCM_METHOD_NCA, 0.1, 0.0, 0.1, -0.1, 1.0, &t) == NCM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("cli: presets, usage errors and exit codes") {
    auto r = cli({"presets"});
    CHECK(r.code == 0);
    CHECK(r.out == "fig2\nspectra\ntransmission\n");

    r = cli({"frobnicate"});
    CHECK(r.code == 1);
    CHECK(r.err.find("usage: ncamaps") != std::string::npos);
    r = cli({});
    CHECK(r.code == 1);
    CHECK(r.err.find("usage: ncamaps") != std::string::npos);
    r = cli({"dynamics", "--bogus"});
    CHECK(r.code == 1);
    CHECK(r.err.find("usage: ncamaps") != std::string::npos);

    const auto dir = fresh_dir("cli");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.cfg") << "alpha = 0.1\n[grid]\ndt = -0.1\n";
    r = cli({"dynamics", "--config", (dir / "bad.cfg").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("grid.dt") != std::string::npos);

    std::ofstream(dir / "ok.cfg") << "alpha = 0.5\nt_max = 10\n";
    r = cli({"dynamics", "--config", (dir / "ok.cfg").string(), "--out", (dir / "a").string(), "--method",
             "nca,born_markov", "--alpha", "0.1,0.2", "--workers", "2"});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "a" / "dynamics_born_markov_alpha0.2.csv"));
    CHECK_FALSE(fs::exists(dir / "a" / "dynamics_nca_alpha0.5.csv"));

    r = cli({"dynamics", "--alpha", "0.1,0.4", "--method", "born_markov", "--out", (dir / "b").string()});
    CHECK(r.code == 2);
    CHECK(r.out.find("born_markov/alpha=0.4: diverged at t=") != std::string::npos);

    // --config and --preset are mutually exclusive.
    r = cli({"steady", "--config", (dir / "ok.cfg").string(), "--preset", "fig2"});
    CHECK(r.code == 1);

    // I/O failure: output path under a regular file.
    r = cli({"dynamics", "--alpha", "0.1", "--set", "t_max=1", "--out", (dir / "bad.cfg" / "x").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("cannot create output directory") != std::string::npos);
    fs::remove_all(dir);
}

}  // TEST_SUITE
