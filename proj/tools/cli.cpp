#include "cli.hpp"

#include "ncamaps.h"

#include <CLI11.hpp>

#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace {

const char* kSynopsis =
    "usage: ncamaps <command> [options]\n"
    "\n"
    "commands:\n"
    "  dynamics       <sx>, <sz> and density diagnostics vs time\n"
    "  steady         steady-state sweep over alpha\n"
    "  spectrum       C_z(omega), susceptibility and |T|^2 from the regression theorem\n"
    "  transmission   |T(omega)|^2 maps over the bias epsilon\n"
    "  convergence    grid self-convergence study\n"
    "  presets        list built-in presets\n"
    "\n"
    "options (run commands):\n"
    "  --config <path>    config file (key = value, [section] headers)\n"
    "  --preset <name>    start from a preset instead of a config file\n"
    "  --out <dir>        output directory (default $NCAMAPS_OUT_DIR, then ./ncamaps-out)\n"
    "  --workers <n>      parallel sweep points (0 = all cores)\n"
    "  --method <list>    override methods: nca,nca_markov,born,born_markov\n"
    "  --alpha <list>     override the alpha list\n"
    "  --set key=value    any other override (repeatable)\n"
    "\n"
    "exit status: 0 success, 2 some points diverged or failed, 1 error\n";

struct RunArgs {
    std::string config;
    std::string preset;
    std::string out;
    unsigned workers = 0;
    std::string method;
    std::string alpha;
    std::vector<std::string> sets;
};

struct ConfigDeleter {
    void operator()(ncm_config* c) const { ncm_config_free(c); }
};
struct ManifestDeleter {
    void operator()(ncm_manifest* m) const { ncm_manifest_free(m); }
};
using ConfigPtr = std::unique_ptr<ncm_config, ConfigDeleter>;
using ManifestPtr = std::unique_ptr<ncm_manifest, ManifestDeleter>;

int report(ncm_status s, std::ostream& err) {
    err << "ncamaps: " << ncm_status_string(s) << ": " << ncm_last_error() << "\n";
    return 1;
}

// Config file or preset, then command-line overrides.
ncm_status build_config(const RunArgs& a, ConfigPtr& out) {
    ncm_config* raw = nullptr;
    ncm_status s = NCM_OK;
    if (!a.config.empty()) {
        s = ncm_config_from_file(a.config.c_str(), &raw);
    } else if (!a.preset.empty()) {
        s = ncm_config_from_preset(a.preset.c_str(), &raw);
    } else {
        s = ncm_config_new(&raw);
    }
    if (s != NCM_OK) {
        return s;
    }
    out.reset(raw);
    auto set = [&](const char* key, const std::string& value) {
        return value.empty() ? NCM_OK : ncm_config_set(out.get(), key, value.c_str());
    };
    if ((s = set("method", a.method)) != NCM_OK || (s = set("bath.alpha", a.alpha)) != NCM_OK ||
        (s = set("output.directory", a.out)) != NCM_OK) {
        return s;
    }
    for (const auto& kv : a.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            return ncm_config_set(out.get(), kv.c_str(), "");
        }
        if ((s = ncm_config_set(out.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str())) != NCM_OK) {
            return s;
        }
    }
    return ncm_config_validate(out.get());
}

int run_pipeline(const std::string& pipeline, const RunArgs& a, std::ostream& out, std::ostream& err) {
    ConfigPtr config;
    if (const auto s = build_config(a, config); s != NCM_OK) {
        return report(s, err);
    }
    ncm_manifest* raw = nullptr;
    if (const auto s = ncm_run(pipeline.c_str(), config.get(), a.workers, &raw); s != NCM_OK) {
        return report(s, err);
    }
    ManifestPtr manifest(raw);
    const size_t runs = ncm_manifest_run_count(manifest.get());
    for (size_t i = 0; i < runs; ++i) {
        out << ncm_manifest_run_id(manifest.get(), i) << ": " << ncm_manifest_run_status(manifest.get(), i) << "\n";
    }
    out << "manifest: " << ncm_manifest_directory(manifest.get()) << "/manifest.txt ("
        << ncm_manifest_file_count(manifest.get()) << " files)\n";
    return ncm_manifest_exit_code(manifest.get());
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"NCA / NCA-Markov / Born / Born-Markov spin-boson simulator", "ncamaps"};
    app.set_version_flag("--version", std::string(ncm_version()));
    app.require_subcommand(1);

    RunArgs args;
    std::string pipeline;
    for (const char* name : {"dynamics", "steady", "spectrum", "transmission", "convergence"}) {
        auto* sub = app.add_subcommand(name, "run the " + std::string(name) + " pipeline");
        auto* config = sub->add_option("--config", args.config, "config file")->check(CLI::ExistingFile);
        sub->add_option("--preset", args.preset, "preset name (a config file names its own with `preset = …`)")
            ->excludes(config);
        sub->add_option("--out", args.out, "output directory");
        sub->add_option("--workers", args.workers, "parallel sweep points (0 = all cores)");
        sub->add_option("--method", args.method, "comma-separated methods");
        sub->add_option("--alpha", args.alpha, "comma-separated alpha list or lo:hi:step");
        sub->add_option("--set", args.sets, "key=value override");
        sub->callback([&pipeline, name] { pipeline = name; });
    }
    auto* presets = app.add_subcommand("presets", "list built-in presets");
    presets->callback([&pipeline] { pipeline = "presets"; });

    if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
        err << "ncamaps: unknown command '" << argv[1] << "'\n\n" << kSynopsis;
        return 1;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help() << "\n" << kSynopsis;
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << ncm_version() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "ncamaps: " << e.what() << "\n\n" << kSynopsis;
        return 1;
    }

    if (pipeline == "presets") {
        for (size_t i = 0; i < ncm_preset_count(); ++i) {
            out << ncm_preset_name(i) << "\n";
        }
        return 0;
    }
    return run_pipeline(pipeline, args, out, err);
}
