#include "ncamaps/pipelines.hpp"

#include "ncamaps/observables.hpp"
#include "text.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#ifndef NCAMAPS_VERSION
#define NCAMAPS_VERSION "unknown"
#endif

namespace ncamaps::run {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t steps_for(double t_cfg, double dt_cfg) {
    return static_cast<std::size_t>(std::llround(t_cfg / dt_cfg));
}

bath::BathSpec bath_for(const cfg::SimulationConfig& c, double alpha) {
    bath::BathSpec b;
    b.alpha = alpha;
    b.omega_c = c.omega_c;
    b.temperature = c.temperature;
    return b;
}

std::string file_stem(const std::string& kind, dyn::Method m, double alpha) {
    return kind + "_" + std::string(dyn::to_string(m)) + "_alpha" + text::number(alpha) + ".csv";
}

class CsvFile {
public:
    CsvFile(const fs::path& path, const std::string& header) : path_(path), out_(path) {
        if (!out_) {
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        }
        out_ << header << '\n';
    }
    template <class... Ts>
    void row(const Ts&... values) {
        std::size_t i = 0;
        ((out_ << (i++ ? "," : "") << text::number(values)), ...);
        out_ << '\n';
    }
    void close() {
        out_.close();
        if (!out_) {
            throw std::runtime_error("write failed for " + path_.string());
        }
    }

private:
    fs::path path_;
    std::ofstream out_;
};

// Runs tasks on up to `workers` threads; results land in task order.
void run_parallel(std::vector<std::function<void()>>& tasks, std::size_t workers) {
    if (workers == 0) {
        workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    workers = std::min(workers, tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                tasks[i]();
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

void mark_trajectory(RunRecord& rec, const dyn::PropagatorTrajectory& traj) {
    if (traj.status == dyn::SolveStatus::diverged) {
        rec.status = RunStatus::diverged;
        rec.diverged_at = text::round_significant(to_config_time(traj.failure_time()), 12);
        rec.message = "numerical instability";
    } else if (traj.status == dyn::SolveStatus::not_converged) {
        rec.status = RunStatus::failed;
        rec.message = traj.message;
    }
}

struct Point {
    dyn::Method method;
    double alpha;
};

std::vector<Point> sweep_points(const cfg::SimulationConfig& c) {
    std::vector<Point> out;
    for (auto m : c.methods) {
        for (double a : c.alphas) {
            out.push_back({m, a});
        }
    }
    return out;
}

RunRecord make_record(const Point& p) {
    RunRecord rec;
    rec.id = std::string(dyn::to_string(p.method)) + "/alpha=" + text::number(p.alpha);
    rec.method = p.method;
    rec.alpha = p.alpha;
    return rec;
}

dyn::PropagatorTrajectory solve_point(const cfg::SimulationConfig& c, const dyn::ModelSpec& model, dyn::Method m,
                                      double alpha, double t_cfg, std::size_t stride,
                                      bath::CorrelationTable* table_out = nullptr) {
    const double dt_cfg = c.step_for(m);
    const std::size_t n = steps_for(t_cfg, dt_cfg);
    auto table = bath::tabulate(bath_for(c, alpha), to_solver_time(dt_cfg), n);
    dyn::SolverOptions opts;
    opts.stride = stride;
    auto traj = dyn::solve(m, model, table, n, opts);
    if (table_out) {
        *table_out = std::move(table);
    }
    return traj;
}

// Regression-theorem correlation F(t) for one model: steady state from the
// stationary kernels, then tr[X V̂(t) X ρ_s].
struct Correlation {
    dyn::PropagatorTrajectory traj;
    obs::ComplexSeries f;
    bool ok = false;
};

Correlation correlation_for(const cfg::SimulationConfig& c, const dyn::ModelSpec& model, dyn::Method m, double alpha,
                            double window_cfg) {
    Correlation out;
    bath::CorrelationTable table;
    out.traj = solve_point(c, model, m, alpha, window_cfg, 1, &table);
    if (!out.traj.ok()) {
        return out;
    }
    const auto kernels = dyn::stationary_kernels(m, out.traj, model, table);
    const auto ss = obs::steady_state(model, kernels);
    out.f = obs::regression_correlation(out.traj, model.coupling(), ss.rho);
    out.ok = true;
    return out;
}

RunManifest start_manifest(const std::string& pipeline, const cfg::SimulationConfig& c) {
    c.validate();
    RunManifest m;
    m.pipeline = pipeline;
    m.version = NCAMAPS_VERSION;
    m.config_text = c.to_text();
    m.directory = cfg::resolve_output_directory(c);
    std::error_code ec;
    fs::create_directories(m.directory, ec);
    if (ec || !fs::is_directory(m.directory)) {
        throw std::runtime_error("cannot create output directory " + m.directory.string() +
                                 (ec ? ": " + ec.message() : ""));
    }
    return m;
}

void finish_manifest(RunManifest& m, Clock::time_point t0, const std::set<std::string>& before) {
    std::set<std::string> written;
    for (const auto& r : m.runs) {
        written.insert(r.files.begin(), r.files.end());
    }
    written.insert("manifest.txt");
    m.files.assign(written.begin(), written.end());
    for (const auto& name : before) {
        if (!written.count(name)) {
            m.foreign_files.push_back(name);
        }
    }
    m.wall_seconds = seconds_since(t0);
    const fs::path path = m.directory / "manifest.txt";
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << manifest_text(m);
    out.close();
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

std::set<std::string> existing_files(const fs::path& dir) {
    std::set<std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file()) {
            out.insert(e.path().filename().string());
        }
    }
    return out;
}

// `after` runs once all points are done, before the manifest is written.
template <class Body>
RunManifest run_sweep(const std::string& pipeline, const cfg::SimulationConfig& c, const RunOptions& opts,
                      Body&& body, const std::function<void(RunManifest&)>& after = {}) {
    const auto t0 = Clock::now();
    RunManifest m = start_manifest(pipeline, c);
    const auto before = existing_files(m.directory);
    const auto points = sweep_points(c);
    m.runs.resize(points.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t i = 0; i < points.size(); ++i) {
        tasks.emplace_back([&, i] {
            const auto ts = Clock::now();
            RunRecord rec = make_record(points[i]);
            try {
                body(rec, m.directory);
            } catch (const obs::DegenerateSteadyState& e) {
                rec.status = RunStatus::failed;
                rec.message = e.what();
            } catch (const bath::QuadratureError& e) {
                rec.status = RunStatus::failed;
                rec.message = e.what();
            }
            rec.wall_seconds = seconds_since(ts);
            m.runs[i] = std::move(rec);
        });
    }
    run_parallel(tasks, opts.workers);
    if (after) {
        after(m);
    }
    finish_manifest(m, t0, before);
    return m;
}

}  // namespace

double to_solver_time(double t_cfg) { return 2.0 * std::numbers::pi * t_cfg; }
double to_config_time(double t_solver) { return t_solver / (2.0 * std::numbers::pi); }

std::string RunRecord::status_text() const {
    switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::diverged: return "diverged at t=" + text::number(diverged_at);
    case RunStatus::failed: return "failed: " + message;
    }
    return "unknown";
}

int RunManifest::exit_code() const {
    for (const auto& r : runs) {
        if (r.status != RunStatus::completed) {
            return 2;
        }
    }
    return 0;
}

std::vector<std::string> pipeline_names() { return {"dynamics", "steady", "spectrum", "transmission", "convergence"}; }

RunManifest run_dynamics(const cfg::SimulationConfig& c, const RunOptions& opts) {
    const auto model = dyn::ModelSpec::spin_boson(c.delta, c.epsilon);
    const Operator rho0 = cfg::initial_density(c.initial_state);
    return run_sweep("dynamics", c, opts, [&](RunRecord& rec, const fs::path& dir) {
        const auto traj = solve_point(c, model, rec.method, rec.alpha, c.t_max, c.output_every);
        mark_trajectory(rec, traj);
        const auto series = obs::evolve_expectations(traj, rho0, {qops::sigma_x(), qops::sigma_z()});
        const auto diag = obs::evolve_diagnostics(traj, rho0);
        const std::string name = file_stem("dynamics", rec.method, rec.alpha);
        CsvFile csv(dir / name, "t,sx,sz,trace,min_eig,purity");
        for (std::size_t k = 0; k < traj.size(); ++k) {
            csv.row(to_config_time(traj.time(k)), series[0].values[k], series[1].values[k], diag[k].trace,
                    diag[k].min_eigenvalue, diag[k].purity);
        }
        csv.close();
        rec.files.push_back(name);
    });
}

RunManifest run_steady_sweep(const cfg::SimulationConfig& c, const RunOptions& opts) {
    const auto model = dyn::ModelSpec::spin_boson(c.delta, c.epsilon);
    struct Row {
        bool ok = false;
        double sx = 0.0, sz = 0.0;
    };
    std::mutex rows_mutex;
    std::map<std::pair<int, double>, Row> rows;
    // One table per method, rows in config order.
    auto write_tables = [&](RunManifest& m) {
        for (auto method : c.methods) {
            const std::string name = "steady_" + std::string(dyn::to_string(method)) + ".csv";
            CsvFile csv(m.directory / name, "alpha,sx_steady,sz_steady");
            for (double a : c.alphas) {
                const Row& r = rows[{static_cast<int>(method), a}];
                if (r.ok) {
                    csv.row(a, r.sx, r.sz);
                }
            }
            csv.close();
            for (auto& rec : m.runs) {
                if (rec.method == method) {
                    rec.files.push_back(name);
                }
            }
        }
    };
    return run_sweep(
        "steady", c, opts,
        [&](RunRecord& rec, const fs::path&) {
            bath::CorrelationTable table;
            const auto traj = solve_point(c, model, rec.method, rec.alpha, c.t_max, 1, &table);
            mark_trajectory(rec, traj);
            Row row;
            if (traj.ok()) {
                const auto ss = obs::steady_state(model, dyn::stationary_kernels(rec.method, traj, model, table));
                row = {true, qops::expectation(qops::sigma_x(), ss.rho), qops::expectation(qops::sigma_z(), ss.rho)};
                rec.extra.emplace_back("kernel_tail_fraction", text::number(ss.tail_fraction));
                rec.extra.emplace_back("separation_ratio", text::number(ss.separation_ratio));
            }
            std::lock_guard lock(rows_mutex);
            rows[{static_cast<int>(rec.method), rec.alpha}] = row;
        },
        write_tables);
}

RunManifest run_spectrum(const cfg::SimulationConfig& c, const RunOptions& opts) {
    const auto model = dyn::ModelSpec::spin_boson(c.delta, c.epsilon);
    const auto omega = c.spectrum_omega.values();
    return run_sweep("spectrum", c, opts, [&](RunRecord& rec, const fs::path& dir) {
        const auto corr = correlation_for(c, model, rec.method, rec.alpha, c.spectrum_window);
        mark_trajectory(rec, corr.traj);
        const std::string name = file_stem("spectrum", rec.method, rec.alpha);
        CsvFile csv(dir / name, "omega,cz,re_chi,im_chi,t2");
        if (corr.ok) {
            const auto cz = obs::spectrum_cz(corr.f, c.spectrum_eta, omega);
            const auto resp =
                obs::susceptibility_and_transmission(corr.f, c.spectrum_eta, omega, c.transmission_coupling);
            for (std::size_t j = 0; j < omega.size(); ++j) {
                csv.row(omega[j], cz.values[j].real(), resp.chi.values[j].real(), resp.chi.values[j].imag(),
                        resp.t2[j]);
            }
            if (cz.short_window) {
                rec.extra.emplace_back("warning", cz.warning);
            }
        }
        csv.close();
        rec.files.push_back(name);
    });
}

RunManifest run_transmission_map(const cfg::SimulationConfig& c, const RunOptions& opts) {
    const auto eps = c.transmission_epsilon.values();
    const auto omega = c.transmission_omega.values();
    const auto t0 = Clock::now();
    RunManifest m = start_manifest("transmission", c);
    const auto before = existing_files(m.directory);
    const auto points = sweep_points(c);

    // One task per (method, α, ε); maps are assembled afterwards in grid order.
    struct Cell {
        dyn::SolveStatus status = dyn::SolveStatus::completed;
        double failure_time = 0.0;
        std::string message;
        std::vector<double> t2;
        bool window_warning = false;
    };
    std::vector<std::vector<Cell>> cells(points.size(), std::vector<Cell>(eps.size()));
    std::vector<double> elapsed(points.size() * eps.size(), 0.0);
    std::vector<std::function<void()>> tasks;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < eps.size(); ++j) {
            tasks.emplace_back([&, i, j] {
                const auto ts = Clock::now();
                const auto model = dyn::ModelSpec::spin_boson(c.delta, eps[j]);
                Cell& cell = cells[i][j];
                try {
                    const auto corr =
                        correlation_for(c, model, points[i].method, points[i].alpha, c.transmission_window);
                    cell.status = corr.traj.status;
                    cell.failure_time = text::round_significant(to_config_time(corr.traj.failure_time()), 12);
                    cell.message = corr.traj.message;
                    if (corr.ok) {
                        const auto r = obs::susceptibility_and_transmission(corr.f, c.transmission_eta, omega,
                                                                            c.transmission_coupling);
                        cell.t2 = r.t2;
                        cell.window_warning = r.chi.short_window;
                    }
                } catch (const obs::DegenerateSteadyState& e) {
                    cell.status = dyn::SolveStatus::not_converged;
                    cell.message = e.what();
                }
                elapsed[i * eps.size() + j] = seconds_since(ts);
            });
        }
    }
    run_parallel(tasks, opts.workers);

    for (std::size_t i = 0; i < points.size(); ++i) {
        RunRecord rec = make_record(points[i]);
        const std::string name = file_stem("transmission", rec.method, rec.alpha);
        CsvFile csv(m.directory / name, "epsilon,omega,t2");
        bool warned = false;
        for (std::size_t j = 0; j < eps.size(); ++j) {
            const Cell& cell = cells[i][j];
            rec.wall_seconds += elapsed[i * eps.size() + j];
            if (cell.status == dyn::SolveStatus::diverged && rec.status == RunStatus::completed) {
                rec.status = RunStatus::diverged;
                rec.diverged_at = cell.failure_time;
                rec.message = "numerical instability at epsilon=" + text::number(eps[j]);
            } else if (cell.status == dyn::SolveStatus::not_converged && rec.status == RunStatus::completed) {
                rec.status = RunStatus::failed;
                rec.message = cell.message + " (epsilon=" + text::number(eps[j]) + ")";
            }
            for (std::size_t k = 0; k < cell.t2.size(); ++k) {
                csv.row(eps[j], omega[k], cell.t2[k]);
            }
            warned = warned || cell.window_warning;
        }
        csv.close();
        if (warned) {
            rec.extra.emplace_back("warning", "damping window too short for transmission.eta");
        }
        rec.files.push_back(name);
        m.runs.push_back(std::move(rec));
    }
    finish_manifest(m, t0, before);
    return m;
}

RunManifest run_convergence(const cfg::SimulationConfig& c, const RunOptions& opts) {
    const auto model = dyn::ModelSpec::spin_boson(c.delta, c.epsilon);
    std::vector<double> dts;
    for (double h : c.convergence_dts) {
        dts.push_back(to_solver_time(h));
    }
    return run_sweep("convergence", c, opts, [&](RunRecord& rec, const fs::path& dir) {
        const auto study = dyn::convergence_study(rec.method, model, bath_for(c, rec.alpha), dts,
                                                  to_solver_time(c.convergence_t_max), {}, std::nullopt,
                                                  cfg::initial_density(c.initial_state));
        for (std::size_t i = 0; i < study.status.size(); ++i) {
            if (study.status[i] != dyn::SolveStatus::completed && rec.status == RunStatus::completed) {
                rec.status = study.status[i] == dyn::SolveStatus::diverged ? RunStatus::diverged : RunStatus::failed;
                rec.message = "at dt=" + text::number(c.convergence_dts[i]);
            }
        }
        const std::string name = file_stem("convergence", rec.method, rec.alpha);
        CsvFile csv(dir / name, "dt_coarse,dt_fine,sup_diff,order");
        for (std::size_t i = 0; i < study.sup_diffs.size(); ++i) {
            const double order = i == 0 ? std::numeric_limits<double>::quiet_NaN() : study.orders[i - 1];
            csv.row(c.convergence_dts[i], c.convergence_dts[i + 1], study.sup_diffs[i], order);
        }
        csv.close();
        rec.files.push_back(name);
        rec.extra.emplace_back("fitted_order", text::number(study.fitted_order));
    });
}

RunManifest run_pipeline(const std::string& name, const cfg::SimulationConfig& config, const RunOptions& opts) {
    if (name == "dynamics") {
        return run_dynamics(config, opts);
    }
    if (name == "steady") {
        return run_steady_sweep(config, opts);
    }
    if (name == "spectrum") {
        return run_spectrum(config, opts);
    }
    if (name == "transmission") {
        return run_transmission_map(config, opts);
    }
    if (name == "convergence") {
        return run_convergence(config, opts);
    }
    throw std::invalid_argument("unknown pipeline '" + name + "'");
}

std::string manifest_text(const RunManifest& m) {
    std::ostringstream out;
    out << "# ncamaps run manifest\n"
        << "pipeline = " << m.pipeline << '\n'
        << "version = " << m.version << '\n'
        << "exit_code = " << m.exit_code() << '\n'
        << "wall_seconds = " << text::number(std::round(m.wall_seconds * 1000.0) / 1000.0) << '\n'
        << "runs = " << m.runs.size() << '\n'
        << "\n[config]\n"
        << m.config_text;
    for (const auto& r : m.runs) {
        out << "\n[run " << r.id << "]\n"
            << "method = " << dyn::to_string(r.method) << '\n'
            << "alpha = " << text::number(r.alpha) << '\n'
            << "status = " << r.status_text() << '\n';
        if (r.status == RunStatus::diverged) {
            out << "diverged_at = " << text::number(r.diverged_at) << '\n';
        }
        if (!r.message.empty() && r.status != RunStatus::failed) {
            out << "message = " << r.message << '\n';
        }
        out << "wall_seconds = " << text::number(std::round(r.wall_seconds * 1000.0) / 1000.0) << '\n';
        for (const auto& [k, v] : r.extra) {
            out << k << " = " << v << '\n';
        }
        for (const auto& f : r.files) {
            out << "file = " << f << '\n';
        }
    }
    out << "\n[files]\n";
    for (const auto& f : m.files) {
        out << "file = " << f << '\n';
    }
    for (const auto& f : m.foreign_files) {
        out << "foreign_file = " << f << '\n';
    }
    return out.str();
}

}  // namespace ncamaps::run
