// pipelines.hpp — sweep orchestration, CSV outputs and the run manifest
//
// Output schemas (times in 2π/ω_c, energies and frequencies in ω_c):
//   dynamics_<method>_alpha<α>.csv      t,sx,sz,trace,min_eig,purity
//   steady_<method>.csv                 alpha,sx_steady,sz_steady
//   spectrum_<method>_alpha<α>.csv      omega,cz,re_chi,im_chi,t2
//   transmission_<method>_alpha<α>.csv  epsilon,omega,t2
//   convergence_<method>_alpha<α>.csv   dt_coarse,dt_fine,sup_diff,order
//   manifest.txt                        key = value records, see write_manifest
//
// CSV contents depend only on the config: sweep points run in parallel but are
// collected in config order, and each point is computed single-threaded.

#pragma once

#include "ncamaps/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ncamaps::run {

enum class RunStatus { completed, diverged, failed };

struct RunRecord {
    std::string id;              // e.g. "nca/alpha=0.1"
    dyn::Method method = dyn::Method::nca;
    double alpha = 0.0;
    RunStatus status = RunStatus::completed;
    double diverged_at = 0.0;    // 2π/ω_c, when status == diverged
    std::string message;
    double wall_seconds = 0.0;
    std::vector<std::string> files;                              // relative to the output directory
    std::vector<std::pair<std::string, std::string>> extra;      // pipeline-specific facts

    std::string status_text() const;  // "completed" | "diverged at t=…" | "failed: …"
};

struct RunManifest {
    std::string pipeline;
    std::string version;
    std::string config_text;
    std::filesystem::path directory;
    std::vector<RunRecord> runs;
    std::vector<std::string> files;          // every file written, including manifest.txt
    std::vector<std::string> foreign_files;  // files already present that this run did not write
    double wall_seconds = 0.0;

    // 0 if every run completed, 2 if some diverged or failed.
    int exit_code() const;
};

struct RunOptions {
    std::size_t workers = 0;  // 0: hardware concurrency
};

std::vector<std::string> pipeline_names();  // dynamics, steady, spectrum, transmission, convergence

RunManifest run_dynamics(const cfg::SimulationConfig& config, const RunOptions& opts = {});
RunManifest run_steady_sweep(const cfg::SimulationConfig& config, const RunOptions& opts = {});
RunManifest run_spectrum(const cfg::SimulationConfig& config, const RunOptions& opts = {});
RunManifest run_transmission_map(const cfg::SimulationConfig& config, const RunOptions& opts = {});
RunManifest run_convergence(const cfg::SimulationConfig& config, const RunOptions& opts = {});

// Dispatch by pipeline name; throws std::invalid_argument for unknown names.
// I/O failures throw std::runtime_error.
RunManifest run_pipeline(const std::string& name, const cfg::SimulationConfig& config, const RunOptions& opts = {});

std::string manifest_text(const RunManifest& m);

// Conversions between config units (2π/ω_c) and solver units (1/ω_c).
double to_solver_time(double t_cfg);
double to_config_time(double t_solver);

}  // namespace ncamaps::run
