#include <doctest.h>

#include "ncamaps/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace ncamaps;
using cfg::ConfigError;

namespace {

std::string error_key(const std::string& text) {
    try {
        cfg::parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal file gets the documented defaults") {
    const auto c = cfg::parse_config_text("alpha: 0.1\n");
    CHECK(c.alphas == std::vector<double>{0.1});
    CHECK(c.delta == 0.1);
    CHECK(c.epsilon == 0.0);
    CHECK(c.dt == 0.1);
    CHECK(c.t_max == 300.0);
    CHECK(c.methods == std::vector<dyn::Method>{dyn::Method::nca});
    CHECK(c.initial_state == cfg::InitialState::down_z);
    CHECK(c.temperature == 0.0);
    CHECK_FALSE(c.born_dt.has_value());
    CHECK(c.step_for(dyn::Method::born) == 0.1);
}

TEST_CASE("sections, comments, lists and ranges") {
    const auto c = cfg::parse_config_text(R"(
# spin-boson sweep
[model]
delta = 0.1
epsilon = 0.05     # bias
[bath]
alpha = 0.1:0.5:0.2
[grid]
dt = 0.05
t_max = 20
born_dt = 0.01
[spectrum]
omega_min = 0.001
omega_max = 0.1
omega_points = 100
[output]
directory = /tmp/x
)");
    CHECK(c.epsilon == 0.05);
    REQUIRE(c.alphas.size() == 3);
    CHECK(c.alphas[2] == doctest::Approx(0.5));
    CHECK(c.step_for(dyn::Method::born) == 0.01);
    CHECK(c.step_for(dyn::Method::born_markov) == 0.05);
    CHECK(c.spectrum_omega.points == 100);
    CHECK(c.output_directory == "/tmp/x");

    const auto m = cfg::parse_config_text("alpha = 0.2\nmethods = nca, born_markov\ninitial_state = mixed\n");
    CHECK(m.methods == std::vector<dyn::Method>{dyn::Method::nca, dyn::Method::born_markov});
    CHECK(cfg::initial_density(m.initial_state).isApprox(0.5 * qops::identity(2)));
}

TEST_CASE("errors name the key path") {
    CHECK(error_key("alpha = 0.1\ndt = -0.1\n") == "grid.dt");
    CHECK(error_key("alpha = 0.1\n[grid]\nt_max = 0.05\n") == "grid.t_max");
    CHECK(error_key("dt = 0.1\n") == "bath.alpha");
    CHECK(error_key("alpha = 0.1\n[model]\ndelta = fast\n") == "model.delta");
    CHECK(error_key("alpha = 0.1\n[model]\nspin = 3\n") == "model.spin");
    CHECK(error_key("alpha = 0.1\nmethod = redfield\n") == "method");
    CHECK(error_key("alpha = 0.1\n[bath]\nomega_c = 2\n") == "bath.omega_c");
    CHECK(error_key("preset = fig3\n") == "preset");
    CHECK(error_key("alpha = 0.1\n[output]\nformats = hdf5\n") == "output.formats");

    try {
        cfg::parse_config_text("alpha = 0.1\ndt = -0.1\n", "run.cfg");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("grid.dt") == 0);
        CHECK(what.find("(run.cfg)") != std::string::npos);
    }
    CHECK_THROWS_AS(cfg::parse_config_text("alpha 0.1\n"), ConfigError);
    CHECK_THROWS_AS(cfg::parse_config("/nonexistent/ncamaps.cfg"), ConfigError);
}

TEST_CASE("fig2 preset carries the figure parameters") {
    const auto c = cfg::preset("fig2");
    CHECK(c.alphas == std::vector<double>{0.01, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0});
    CHECK(c.methods.size() == 4);
    CHECK(c.delta == 0.1);
    CHECK(c.dt == 0.1);
    CHECK(c.step_for(dyn::Method::born) == 0.01);
    CHECK(c.step_for(dyn::Method::nca) == 0.1);

    const auto t = cfg::preset("transmission");
    CHECK(t.alphas == std::vector<double>{0.1, 0.6});
    CHECK(t.transmission_epsilon.lo == -0.5);
    CHECK(t.transmission_omega.hi == 0.3);
    CHECK(cfg::preset_names() == std::vector<std::string>{"fig2", "spectra", "transmission"});

    // A preset named in a file is applied before the file's own keys.
    const auto o = cfg::parse_config_text("alpha = 0.3\npreset = spectra\n");
    CHECK(o.alphas == std::vector<double>{0.3});
    CHECK(o.preset == "spectra");
}

TEST_CASE("text form parses back to the same config") {
    for (const auto& name : cfg::preset_names()) {
        const auto c = cfg::preset(name);
        const auto back = cfg::parse_config_text(c.to_text());
        CHECK(back.to_text() == c.to_text());
    }
    auto c = cfg::parse_config_text("alpha = 0.1, 0.25\n[grid]\nborn_dt = 0.02\n");
    CHECK(cfg::parse_config_text(c.to_text()).to_text() == c.to_text());
}

TEST_CASE("overrides and output directory fallback") {
    auto c = cfg::preset("fig2");
    cfg::set_value(c, "alpha", "0.3");
    cfg::set_value(c, "methods", "born_markov");
    CHECK(c.alphas == std::vector<double>{0.3});
    CHECK(c.methods == std::vector<dyn::Method>{dyn::Method::born_markov});
    CHECK_THROWS_AS(cfg::set_value(c, "grid.speed", "1"), ConfigError);

    c.output_directory = "explicit";
    CHECK(cfg::resolve_output_directory(c) == "explicit");
    c.output_directory.clear();
    ::setenv("NCAMAPS_OUT_DIR", "/tmp/from-env", 1);
    CHECK(cfg::resolve_output_directory(c) == "/tmp/from-env");
    ::unsetenv("NCAMAPS_OUT_DIR");
    CHECK(cfg::resolve_output_directory(c) == "ncamaps-out");
}

TEST_CASE("config file on disk") {
    const auto path = std::filesystem::temp_directory_path() / "ncamaps_unit.cfg";
    std::ofstream(path) << "[bath]\nalpha = 0.1\n";
    const auto c = cfg::parse_config(path);
    std::filesystem::remove(path);
    CHECK(c.alphas == std::vector<double>{0.1});
}

}  // TEST_SUITE
