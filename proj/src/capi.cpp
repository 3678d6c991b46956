#include "ncamaps.h"

#include "ncamaps/config.hpp"
#include "ncamaps/observables.hpp"
#include "ncamaps/pipelines.hpp"

#include <cstring>
#include <string>
#include <vector>

struct ncm_config {
    ncamaps::cfg::SimulationConfig value;
};

struct ncm_manifest {
    ncamaps::run::RunManifest value;
    std::string directory;
    std::string text;
    std::vector<std::string> statuses;
};

struct ncm_trajectory {
    ncamaps::dyn::PropagatorTrajectory value;
};

namespace {

thread_local std::string last_error;

ncm_status fail(ncm_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Maps exceptions escaping the core onto status codes.
template <class F>
ncm_status guarded(F&& body) {
    last_error.clear();
    try {
        return body();
    } catch (const ncamaps::cfg::ConfigError& e) {
        return fail(NCM_ERR_CONFIG, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(NCM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(NCM_ERR_IO, e.what());
    } catch (const std::overflow_error& e) {
        return fail(NCM_ERR_NUMERICAL, e.what());
    } catch (const std::runtime_error& e) {
        return fail(NCM_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(NCM_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(NCM_ERR_INTERNAL, "unknown error");
    }
}

const std::vector<std::string>& presets() {
    static const std::vector<std::string> names = ncamaps::cfg::preset_names();
    return names;
}

const std::vector<std::string>& pipelines() {
    static const std::vector<std::string> names = ncamaps::run::pipeline_names();
    return names;
}

}  // namespace

extern "C" {

const char* ncm_version(void) { return NCAMAPS_VERSION; }

const char* ncm_last_error(void) { return last_error.c_str(); }

const char* ncm_status_string(ncm_status status) {
    switch (status) {
    case NCM_OK: return "ok";
    case NCM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NCM_ERR_CONFIG: return "configuration error";
    case NCM_ERR_IO: return "i/o error";
    case NCM_ERR_NUMERICAL: return "numerical error";
    case NCM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

size_t ncm_preset_count(void) { return presets().size(); }
const char* ncm_preset_name(size_t index) { return index < presets().size() ? presets()[index].c_str() : nullptr; }
size_t ncm_pipeline_count(void) { return pipelines().size(); }
const char* ncm_pipeline_name(size_t index) {
    return index < pipelines().size() ? pipelines()[index].c_str() : nullptr;
}

ncm_status ncm_config_new(ncm_config** out) {
    if (!out) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_config_new: out is null");
    }
    return guarded([&] {
        *out = new ncm_config{};
        return NCM_OK;
    });
}

ncm_status ncm_config_from_file(const char* path, ncm_config** out) {
    if (!path || !out) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_config_from_file: null argument");
    }
    return guarded([&] {
        *out = new ncm_config{ncamaps::cfg::parse_config(path)};
        return NCM_OK;
    });
}

ncm_status ncm_config_from_string(const char* text, ncm_config** out) {
    if (!text || !out) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_config_from_string: null argument");
    }
    return guarded([&] {
        *out = new ncm_config{ncamaps::cfg::parse_config_text(text)};
        return NCM_OK;
    });
}

ncm_status ncm_config_from_preset(const char* name, ncm_config** out) {
    if (!name || !out) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_config_from_preset: null argument");
    }
    return guarded([&] {
        *out = new ncm_config{ncamaps::cfg::preset(name)};
        return NCM_OK;
    });
}

ncm_status ncm_config_set(ncm_config* config, const char* key, const char* value) {
    if (!config || !key || !value) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_config_set: null argument");
    }
    return guarded([&] {
        if (std::string(key) == "preset") {
            // Re-base on the preset; keys set earlier are dropped.
            config->value = ncamaps::cfg::preset(value);
        } else {
            ncamaps::cfg::set_value(config->value, key, value);
        }
        return NCM_OK;
    });
}

ncm_status ncm_config_validate(const ncm_config* config) {
    if (!config) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_config_validate: null config");
    }
    return guarded([&] {
        config->value.validate();
        return NCM_OK;
    });
}

ncm_status ncm_config_to_text(const ncm_config* config, char* buffer, size_t capacity, size_t* needed) {
    if (!config) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_config_to_text: null config");
    }
    return guarded([&] {
        const std::string text = config->value.to_text();
        if (needed) {
            *needed = text.size() + 1;
        }
        if (buffer) {
            if (capacity < text.size() + 1) {
                return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_config_to_text: buffer too small");
            }
            std::memcpy(buffer, text.c_str(), text.size() + 1);
        }
        return NCM_OK;
    });
}

void ncm_config_free(ncm_config* config) { delete config; }

ncm_status ncm_run(const char* pipeline, const ncm_config* config, unsigned workers, ncm_manifest** out) {
    if (!pipeline || !config || !out) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_run: null argument");
    }
    return guarded([&] {
        ncamaps::run::RunOptions opts;
        opts.workers = workers;
        auto m = std::make_unique<ncm_manifest>();
        m->value = ncamaps::run::run_pipeline(pipeline, config->value, opts);
        m->directory = m->value.directory.string();
        m->text = ncamaps::run::manifest_text(m->value);
        for (const auto& r : m->value.runs) {
            m->statuses.push_back(r.status_text());
        }
        *out = m.release();
        return NCM_OK;
    });
}

int ncm_manifest_exit_code(const ncm_manifest* manifest) { return manifest ? manifest->value.exit_code() : 1; }

const char* ncm_manifest_directory(const ncm_manifest* manifest) {
    return manifest ? manifest->directory.c_str() : nullptr;
}

const char* ncm_manifest_text(const ncm_manifest* manifest) { return manifest ? manifest->text.c_str() : nullptr; }

size_t ncm_manifest_run_count(const ncm_manifest* manifest) { return manifest ? manifest->value.runs.size() : 0; }

const char* ncm_manifest_run_id(const ncm_manifest* manifest, size_t index) {
    if (!manifest || index >= manifest->value.runs.size()) {
        return nullptr;
    }
    return manifest->value.runs[index].id.c_str();
}

const char* ncm_manifest_run_status(const ncm_manifest* manifest, size_t index) {
    if (!manifest || index >= manifest->statuses.size()) {
        return nullptr;
    }
    return manifest->statuses[index].c_str();
}

size_t ncm_manifest_file_count(const ncm_manifest* manifest) { return manifest ? manifest->value.files.size() : 0; }

const char* ncm_manifest_file(const ncm_manifest* manifest, size_t index) {
    if (!manifest || index >= manifest->value.files.size()) {
        return nullptr;
    }
    return manifest->value.files[index].c_str();
}

void ncm_manifest_free(ncm_manifest* manifest) { delete manifest; }

ncm_status ncm_solve(ncm_method method, double delta, double epsilon, double alpha, double dt, double t_max,
                     ncm_trajectory** out) {
    if (!out) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_solve: out is null");
    }
    if (method < NCM_METHOD_NCA || method > NCM_METHOD_BORN_MARKOV) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_solve: unknown method");
    }
    if (!(dt > 0.0) || !(t_max > dt)) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_solve: need dt > 0 and t_max > dt");
    }
    return guarded([&] {
        using namespace ncamaps;
        const auto model = dyn::ModelSpec::spin_boson(delta, epsilon);
        bath::BathSpec spec;
        spec.alpha = alpha;
        const auto n = static_cast<std::size_t>(std::llround(t_max / dt));
        const auto table = bath::tabulate(spec, run::to_solver_time(dt), n);
        *out = new ncm_trajectory{dyn::solve(static_cast<dyn::Method>(method), model, table, n)};
        return NCM_OK;
    });
}

size_t ncm_trajectory_size(const ncm_trajectory* traj) { return traj ? traj->value.size() : 0; }

ncm_solve_status ncm_trajectory_status(const ncm_trajectory* traj) {
    if (!traj) {
        return NCM_SOLVE_NOT_CONVERGED;
    }
    switch (traj->value.status) {
    case ncamaps::dyn::SolveStatus::completed: return NCM_SOLVE_COMPLETED;
    case ncamaps::dyn::SolveStatus::diverged: return NCM_SOLVE_DIVERGED;
    case ncamaps::dyn::SolveStatus::not_converged: return NCM_SOLVE_NOT_CONVERGED;
    }
    return NCM_SOLVE_NOT_CONVERGED;
}

double ncm_trajectory_failure_time(const ncm_trajectory* traj) {
    return traj ? ncamaps::run::to_config_time(traj->value.failure_time()) : 0.0;
}

ncm_status ncm_trajectory_expectations(const ncm_trajectory* traj, double* t, double* sx, double* sz,
                                       size_t capacity) {
    if (!traj) {
        return fail(NCM_ERR_INVALID_ARGUMENT, "ncm_trajectory_expectations: null trajectory");
    }
    return guarded([&] {
        using namespace ncamaps;
        const auto& tr = traj->value;
        const auto series =
            obs::evolve_expectations(tr, qops::projector_down(), {qops::sigma_x(), qops::sigma_z()});
        const std::size_t n = std::min(capacity, tr.size());
        for (std::size_t k = 0; k < n; ++k) {
            if (t) {
                t[k] = run::to_config_time(tr.time(k));
            }
            if (sx) {
                sx[k] = series[0].values[k];
            }
            if (sz) {
                sz[k] = series[1].values[k];
            }
        }
        return NCM_OK;
    });
}

void ncm_trajectory_free(ncm_trajectory* traj) { delete traj; }

}  // extern "C"
