// config.hpp — SimulationConfig and its text format
//
// Grammar (one entry per line):
//
//     # comment                      (also after a value)
//     [section]                      prefixes following keys with "section."
//     key = value   |   key: value
//     list = 0.1, 0.2, 0.5           comma-separated lists where a list is allowed
//     list = 0.1:0.9:0.2             lo:hi:step inclusive range
//
// Times are in units of 2π/ω_c, energies in units of ω_c. Unknown keys are
// rejected; every error names the full key path.

#pragma once

#include "ncamaps/dynmaps.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncamaps::cfg {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

enum class InitialState { down_z, up_z, mixed };
std::string_view to_string(InitialState s);
Operator initial_density(InitialState s);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t points = 1;
    std::vector<double> values() const;
};

struct SimulationConfig {
    std::string preset;  // empty when none

    double delta = 0.1;
    double epsilon = 0.0;

    std::vector<double> alphas;  // required, nonempty
    double omega_c = 1.0;
    double temperature = 0.0;

    std::vector<dyn::Method> methods{dyn::Method::nca};
    double dt = 0.1;
    double t_max = 300.0;
    std::optional<double> born_dt;  // step used for the Born method only
    std::size_t output_every = 1;   // CSV keeps every n-th grid point

    InitialState initial_state = InitialState::down_z;

    std::string output_directory;  // empty: $NCAMAPS_OUT_DIR, then "ncamaps-out"
    std::vector<std::string> output_formats{"csv"};

    // Regression-theorem spectra.
    double spectrum_eta = 0.002;
    double spectrum_window = 4000.0;
    Range spectrum_omega{0.0005, 0.2, 400};

    // Transmission maps.
    double transmission_eta = 0.002;
    double transmission_window = 1000.0;
    double transmission_coupling = 1.0;
    Range transmission_epsilon{-0.5, 0.5, 21};
    Range transmission_omega{0.0, 0.3, 61};

    // Grid refinement study.
    std::vector<double> convergence_dts{0.2, 0.1, 0.05, 0.025};
    double convergence_t_max = 50.0;

    // Step used for a given method.
    double step_for(dyn::Method m) const;

    // Throws ConfigError naming the offending key.
    void validate() const;

    // key = value lines that parse back to an equal config.
    std::string to_text() const;
};

std::vector<std::string> preset_names();
// Throws ConfigError for unknown names.
SimulationConfig preset(const std::string& name);

// Applies one key/value (aliases accepted); used by the parser and by overrides.
void set_value(SimulationConfig& cfg, const std::string& key, const std::string& value);

SimulationConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
SimulationConfig parse_config(const std::filesystem::path& path);

// Output directory after applying the environment fallback.
std::filesystem::path resolve_output_directory(const SimulationConfig& cfg);

}  // namespace ncamaps::cfg
