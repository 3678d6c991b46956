#include "ncamaps/config.hpp"

#include "text.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace ncamaps::cfg {

namespace {

const std::map<std::string, std::string>& aliases() {
    static const std::map<std::string, std::string> table{
        {"alpha", "bath.alpha"},     {"delta", "model.delta"}, {"epsilon", "model.epsilon"},
        {"dt", "grid.dt"},           {"t_max", "grid.t_max"},  {"methods", "method"},
        {"temperature", "bath.temperature"},
    };
    return table;
}

double parse_number(const std::string& key, std::string_view raw) {
    const auto v = text::parse_double(raw);
    if (!v || !std::isfinite(*v)) {
        throw ConfigError(key, "expected a number, got '" + std::string(text::trim(raw)) + "'");
    }
    return *v;
}

std::size_t parse_count(const std::string& key, std::string_view raw) {
    const double v = parse_number(key, raw);
    if (v < 1.0 || v != std::floor(v) || v > 1e9) {
        throw ConfigError(key, "expected a positive integer, got '" + std::string(text::trim(raw)) + "'");
    }
    return static_cast<std::size_t>(v);
}

// "a, b, c" or "lo:hi:step"
std::vector<double> parse_number_list(const std::string& key, std::string_view raw) {
    const auto body = text::trim(raw);
    if (body.empty()) {
        throw ConfigError(key, "empty list");
    }
    if (body.find(':') != std::string_view::npos) {
        const auto parts = text::split(body, ':');
        if (parts.size() != 3) {
            throw ConfigError(key, "range must be lo:hi:step");
        }
        const double lo = parse_number(key, parts[0]);
        const double hi = parse_number(key, parts[1]);
        const double step = parse_number(key, parts[2]);
        if (!(step > 0.0) || hi < lo) {
            throw ConfigError(key, "range needs step > 0 and hi >= lo");
        }
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        if (n > 100000) {
            throw ConfigError(key, "range has too many points");
        }
        std::vector<double> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            // Round to 12 significant digits so 0.1:0.9:0.2 yields 0.3, not 0.30000000000000004.
            out[k] = text::round_significant(lo + step * static_cast<double>(k), 12);
        }
        return out;
    }
    std::vector<double> out;
    for (auto part : text::split(body, ',')) {
        out.push_back(parse_number(key, part));
    }
    return out;
}

std::vector<std::string> parse_word_list(const std::string& key, std::string_view raw) {
    std::vector<std::string> out;
    for (auto part : text::split(raw, ',')) {
        const auto word = text::trim(part);
        if (word.empty()) {
            throw ConfigError(key, "empty list entry");
        }
        out.emplace_back(word);
    }
    return out;
}

std::string join_numbers(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? ", " : "") + text::number(values[i]);
    }
    return out;
}

using Setter = std::function<void(SimulationConfig&, const std::string&, const std::string&)>;

Setter number_into(double SimulationConfig::*field) {
    return [field](SimulationConfig& c, const std::string& k, const std::string& v) {
        c.*field = parse_number(k, v);
    };
}

Setter range_field(Range SimulationConfig::*range, int which) {
    return [range, which](SimulationConfig& c, const std::string& k, const std::string& v) {
        Range& r = c.*range;
        if (which == 0) {
            r.lo = parse_number(k, v);
        } else if (which == 1) {
            r.hi = parse_number(k, v);
        } else {
            r.points = parse_count(k, v);
        }
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"preset", [](SimulationConfig& c, const std::string&, const std::string& v) { c.preset = v; }},
        {"model.delta", number_into(&SimulationConfig::delta)},
        {"model.epsilon", number_into(&SimulationConfig::epsilon)},
        {"bath.alpha",
         [](SimulationConfig& c, const std::string& k, const std::string& v) { c.alphas = parse_number_list(k, v); }},
        {"bath.kind",
         [](SimulationConfig&, const std::string& k, const std::string& v) {
             if (v != "ohmic_sharp_cutoff") {
                 throw ConfigError(k, "unsupported bath kind '" + v + "' (only ohmic_sharp_cutoff)");
             }
         }},
        {"bath.omega_c", number_into(&SimulationConfig::omega_c)},
        {"bath.temperature", number_into(&SimulationConfig::temperature)},
        {"method",
         [](SimulationConfig& c, const std::string& k, const std::string& v) {
             c.methods.clear();
             for (const auto& word : parse_word_list(k, v)) {
                 const auto m = dyn::parse_method(word);
                 if (!m) {
                     throw ConfigError(k, "unknown method '" + word + "' (nca, nca_markov, born, born_markov)");
                 }
                 c.methods.push_back(*m);
             }
         }},
        {"grid.dt", number_into(&SimulationConfig::dt)},
        {"grid.t_max", number_into(&SimulationConfig::t_max)},
        {"grid.born_dt",
         [](SimulationConfig& c, const std::string& k, const std::string& v) { c.born_dt = parse_number(k, v); }},
        {"grid.output_every",
         [](SimulationConfig& c, const std::string& k, const std::string& v) { c.output_every = parse_count(k, v); }},
        {"initial_state",
         [](SimulationConfig& c, const std::string& k, const std::string& v) {
             if (v == "down_z") {
                 c.initial_state = InitialState::down_z;
             } else if (v == "up_z") {
                 c.initial_state = InitialState::up_z;
             } else if (v == "mixed") {
                 c.initial_state = InitialState::mixed;
             } else {
                 throw ConfigError(k, "expected down_z, up_z or mixed, got '" + v + "'");
             }
         }},
        {"output.directory",
         [](SimulationConfig& c, const std::string&, const std::string& v) { c.output_directory = v; }},
        {"output.formats",
         [](SimulationConfig& c, const std::string& k, const std::string& v) {
             c.output_formats = parse_word_list(k, v);
         }},
        {"spectrum.eta", number_into(&SimulationConfig::spectrum_eta)},
        {"spectrum.window", number_into(&SimulationConfig::spectrum_window)},
        {"spectrum.omega_min", range_field(&SimulationConfig::spectrum_omega, 0)},
        {"spectrum.omega_max", range_field(&SimulationConfig::spectrum_omega, 1)},
        {"spectrum.omega_points", range_field(&SimulationConfig::spectrum_omega, 2)},
        {"transmission.eta", number_into(&SimulationConfig::transmission_eta)},
        {"transmission.window", number_into(&SimulationConfig::transmission_window)},
        {"transmission.coupling", number_into(&SimulationConfig::transmission_coupling)},
        {"transmission.epsilon_min", range_field(&SimulationConfig::transmission_epsilon, 0)},
        {"transmission.epsilon_max", range_field(&SimulationConfig::transmission_epsilon, 1)},
        {"transmission.epsilon_points", range_field(&SimulationConfig::transmission_epsilon, 2)},
        {"transmission.omega_min", range_field(&SimulationConfig::transmission_omega, 0)},
        {"transmission.omega_max", range_field(&SimulationConfig::transmission_omega, 1)},
        {"transmission.omega_points", range_field(&SimulationConfig::transmission_omega, 2)},
        {"convergence.dts",
         [](SimulationConfig& c, const std::string& k, const std::string& v) {
             c.convergence_dts = parse_number_list(k, v);
         }},
        {"convergence.t_max", number_into(&SimulationConfig::convergence_t_max)},
    };
    return table;
}

std::string canonical_key(const std::string& key) {
    const auto it = aliases().find(key);
    return it == aliases().end() ? key : it->second;
}

bool is_multiple(double total, double step) {
    const double ratio = total / step;
    return std::abs(ratio - std::round(ratio)) <= 1e-6 * std::max(1.0, ratio);
}

}  // namespace

std::string_view to_string(InitialState s) {
    switch (s) {
    case InitialState::down_z: return "down_z";
    case InitialState::up_z: return "up_z";
    case InitialState::mixed: return "mixed";
    }
    return "unknown";
}

Operator initial_density(InitialState s) {
    switch (s) {
    case InitialState::down_z: return qops::projector_down();
    case InitialState::up_z: return qops::projector_up();
    case InitialState::mixed: return 0.5 * qops::identity(2);
    }
    throw std::invalid_argument("initial_density: unknown state");
}

std::vector<double> Range::values() const {
    std::vector<double> out(points);
    for (std::size_t k = 0; k < points; ++k) {
        out[k] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    }
    return out;
}

double SimulationConfig::step_for(dyn::Method m) const {
    return (m == dyn::Method::born && born_dt) ? *born_dt : dt;
}

void SimulationConfig::validate() const {
    if (!std::isfinite(delta) || delta < 0.0) {
        throw ConfigError("model.delta", "must be finite and >= 0");
    }
    if (alphas.empty()) {
        throw ConfigError("bath.alpha", "at least one value is required");
    }
    for (double a : alphas) {
        if (!(a >= 0.0)) {
            throw ConfigError("bath.alpha", "values must be >= 0, got " + text::number(a));
        }
    }
    if (omega_c != 1.0) {
        throw ConfigError("bath.omega_c", "must be 1: energies are measured in units of omega_c");
    }
    if (!(temperature >= 0.0)) {
        throw ConfigError("bath.temperature", "must be >= 0");
    }
    if (methods.empty()) {
        throw ConfigError("method", "at least one method is required");
    }
    if (!(dt > 0.0)) {
        throw ConfigError("grid.dt", "must be > 0, got " + text::number(dt));
    }
    if (!(t_max > dt)) {
        throw ConfigError("grid.t_max", "must exceed grid.dt");
    }
    if (!is_multiple(t_max, dt)) {
        throw ConfigError("grid.t_max", "must be a multiple of grid.dt");
    }
    if (born_dt) {
        if (!(*born_dt > 0.0)) {
            throw ConfigError("grid.born_dt", "must be > 0, got " + text::number(*born_dt));
        }
        if (!is_multiple(t_max, *born_dt)) {
            throw ConfigError("grid.born_dt", "grid.t_max must be a multiple of it");
        }
    }
    for (const auto& f : output_formats) {
        if (f != "csv") {
            throw ConfigError("output.formats", "unsupported format '" + f + "' (csv)");
        }
    }
    if (!(spectrum_eta > 0.0)) {
        throw ConfigError("spectrum.eta", "must be > 0");
    }
    if (!(spectrum_window > dt) || !is_multiple(spectrum_window, dt)) {
        throw ConfigError("spectrum.window", "must exceed grid.dt and be a multiple of it");
    }
    if (born_dt && !is_multiple(spectrum_window, *born_dt)) {
        throw ConfigError("spectrum.window", "must be a multiple of grid.born_dt");
    }
    if (!(transmission_eta > 0.0)) {
        throw ConfigError("transmission.eta", "must be > 0");
    }
    if (!(transmission_window > dt) || !is_multiple(transmission_window, dt)) {
        throw ConfigError("transmission.window", "must exceed grid.dt and be a multiple of it");
    }
    if (born_dt && !is_multiple(transmission_window, *born_dt)) {
        throw ConfigError("transmission.window", "must be a multiple of grid.born_dt");
    }
    if (spectrum_omega.hi < spectrum_omega.lo) {
        throw ConfigError("spectrum.omega_max", "must be >= spectrum.omega_min");
    }
    if (transmission_epsilon.hi < transmission_epsilon.lo) {
        throw ConfigError("transmission.epsilon_max", "must be >= transmission.epsilon_min");
    }
    if (transmission_omega.hi < transmission_omega.lo) {
        throw ConfigError("transmission.omega_max", "must be >= transmission.omega_min");
    }
    if (convergence_dts.size() < 2) {
        throw ConfigError("convergence.dts", "need at least two steps");
    }
    for (std::size_t i = 0; i < convergence_dts.size(); ++i) {
        const double h = convergence_dts[i];
        if (!(h > 0.0) || (i > 0 && !(h < convergence_dts[i - 1]))) {
            throw ConfigError("convergence.dts", "must be positive and strictly descending");
        }
        if (i > 0 && !is_multiple(convergence_dts[i - 1], h)) {
            throw ConfigError("convergence.dts", "each step must divide the previous one");
        }
        if (!is_multiple(convergence_t_max, h)) {
            throw ConfigError("convergence.t_max", "must be a multiple of every convergence step");
        }
    }
}

std::string SimulationConfig::to_text() const {
    std::ostringstream out;
    auto line = [&](const std::string& k, const std::string& v) { out << k << " = " << v << '\n'; };
    if (!preset.empty()) {
        line("preset", preset);
    }
    line("model.delta", text::number(delta));
    line("model.epsilon", text::number(epsilon));
    line("bath.kind", "ohmic_sharp_cutoff");
    line("bath.alpha", join_numbers(alphas));
    line("bath.omega_c", text::number(omega_c));
    line("bath.temperature", text::number(temperature));
    std::string ms;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        ms += (i ? ", " : "") + std::string(dyn::to_string(methods[i]));
    }
    line("method", ms);
    line("grid.dt", text::number(dt));
    line("grid.t_max", text::number(t_max));
    if (born_dt) {
        line("grid.born_dt", text::number(*born_dt));
    }
    line("grid.output_every", std::to_string(output_every));
    line("initial_state", std::string(to_string(initial_state)));
    if (!output_directory.empty()) {
        line("output.directory", output_directory);
    }
    std::string fs;
    for (std::size_t i = 0; i < output_formats.size(); ++i) {
        fs += (i ? ", " : "") + output_formats[i];
    }
    line("output.formats", fs);
    line("spectrum.eta", text::number(spectrum_eta));
    line("spectrum.window", text::number(spectrum_window));
    line("spectrum.omega_min", text::number(spectrum_omega.lo));
    line("spectrum.omega_max", text::number(spectrum_omega.hi));
    line("spectrum.omega_points", std::to_string(spectrum_omega.points));
    line("transmission.eta", text::number(transmission_eta));
    line("transmission.window", text::number(transmission_window));
    line("transmission.coupling", text::number(transmission_coupling));
    line("transmission.epsilon_min", text::number(transmission_epsilon.lo));
    line("transmission.epsilon_max", text::number(transmission_epsilon.hi));
    line("transmission.epsilon_points", std::to_string(transmission_epsilon.points));
    line("transmission.omega_min", text::number(transmission_omega.lo));
    line("transmission.omega_max", text::number(transmission_omega.hi));
    line("transmission.omega_points", std::to_string(transmission_omega.points));
    line("convergence.dts", join_numbers(convergence_dts));
    line("convergence.t_max", text::number(convergence_t_max));
    return out.str();
}

std::vector<std::string> preset_names() { return {"fig2", "spectra", "transmission"}; }

SimulationConfig preset(const std::string& name) {
    SimulationConfig c;
    c.preset = name;
    if (name == "fig2") {
        c.alphas = {0.01, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0};
        c.methods = {dyn::Method::nca, dyn::Method::nca_markov, dyn::Method::born, dyn::Method::born_markov};
        c.dt = 0.1;
        c.born_dt = 0.01;
        c.t_max = 300.0;
    } else if (name == "spectra") {
        c.alphas = {0.1, 0.5, 0.9};
        c.methods = {dyn::Method::nca, dyn::Method::nca_markov, dyn::Method::born};
        c.spectrum_eta = 0.002;
        c.spectrum_window = 4000.0;
    } else if (name == "transmission") {
        c.alphas = {0.1, 0.6};
        c.methods = {dyn::Method::nca, dyn::Method::born};
        c.transmission_epsilon = {-0.5, 0.5, 21};
        c.transmission_omega = {0.0, 0.3, 61};
    } else {
        std::string known;
        for (const auto& n : preset_names()) {
            known += (known.empty() ? "" : ", ") + n;
        }
        throw ConfigError("preset", "unknown preset '" + name + "' (" + known + ")");
    }
    return c;
}

void set_value(SimulationConfig& cfg, const std::string& key, const std::string& value) {
    const std::string k = canonical_key(key);
    const auto it = setters().find(k);
    if (it == setters().end()) {
        throw ConfigError(key, "unknown key");
    }
    it->second(cfg, k, std::string(text::trim(value)));
}

SimulationConfig parse_config_text(const std::string& body, const std::string& origin) {
    struct Entry {
        std::size_t line;
        std::string key;
        std::string value;
    };
    std::vector<Entry> entries;
    std::istringstream in(body);
    std::string raw;
    std::string section;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& key, const std::string& why) -> ConfigError {
        return ConfigError(key, why + " (" + origin + ":" + std::to_string(lineno) + ")");
    };
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = text::trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw fail("", "malformed section header");
            }
            section = std::string(text::trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto sep = line.find_first_of("=:");
        if (sep == std::string_view::npos) {
            throw fail("", "expected 'key = value'");
        }
        std::string key(text::trim(line.substr(0, sep)));
        if (key.empty()) {
            throw fail("", "missing key");
        }
        if (!section.empty()) {
            key = section + "." + key;
        }
        entries.push_back({lineno, key, std::string(text::trim(line.substr(sep + 1)))});
    }

    SimulationConfig cfg;
    for (const auto& e : entries) {
        if (canonical_key(e.key) == "preset") {
            lineno = e.line;
            try {
                cfg = preset(e.value);
            } catch (const ConfigError& err) {
                throw fail("preset", std::string(err.what()).substr(std::string("preset: ").size()));
            }
        }
    }
    for (const auto& e : entries) {
        lineno = e.line;
        if (canonical_key(e.key) == "preset") {
            continue;
        }
        try {
            set_value(cfg, e.key, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError(err.key(), std::string(err.what()).substr(err.key().size() + 2) + " (" + origin +
                                             ":" + std::to_string(lineno) + ")");
        }
    }
    try {
        cfg.validate();
    } catch (const ConfigError& err) {
        throw ConfigError(err.key(), std::string(err.what()).substr(err.key().size() + 2) + " (" + origin + ")");
    }
    return cfg;
}

SimulationConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

std::filesystem::path resolve_output_directory(const SimulationConfig& cfg) {
    if (!cfg.output_directory.empty()) {
        return cfg.output_directory;
    }
    if (const char* env = std::getenv("NCAMAPS_OUT_DIR"); env && *env) {
        return env;
    }
    return "ncamaps-out";
}

}  // namespace ncamaps::cfg
