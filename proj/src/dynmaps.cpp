#include "ncamaps/dynmaps.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ncamaps::dyn {

namespace {

using bath::CorrelationTable;

void require_grid(const CorrelationTable& bath, std::size_t n_steps) {
    if (n_steps < 1) {
        throw std::invalid_argument("solver: n_steps must be >= 1");
    }
    if (!(bath.dt > 0.0)) {
        throw std::invalid_argument("solver: bath table has no time step");
    }
    if (bath.size() < n_steps + 1) {
        throw std::invalid_argument("solver: bath table holds " + std::to_string(bath.size()) +
                                    " points, need " + std::to_string(n_steps + 1));
    }
}

bool blown_up(const SuperOperator& v, double threshold) {
    return !v.allFinite() || v.cwiseAbs().maxCoeff() > threshold;
}

// Collects maps at the requested stride and records how the run ended.
class TrajectoryBuilder {
public:
    TrajectoryBuilder(Method method, double dt, const SolverOptions& opts, std::size_t n_steps)
        : threshold_(opts.blowup_threshold) {
        if (opts.stride == 0) {
            throw std::invalid_argument("solver: stride must be >= 1");
        }
        traj_.method = method;
        traj_.dt = dt;
        traj_.stride = opts.stride;
        traj_.maps.reserve(n_steps / opts.stride + 1);
    }

    // Returns false once the run has to stop.
    bool push(std::size_t step, const SuperOperator& v) {
        if (blown_up(v, threshold_)) {
            std::ostringstream msg;
            msg << "numerical instability: diverged at t=" << traj_.dt * static_cast<double>(step)
                << " (step " << step << ")";
            fail(SolveStatus::diverged, step, msg.str());
            return false;
        }
        traj_.last_step = step;
        if (step % traj_.stride == 0) {
            traj_.maps.push_back(v);
        }
        return true;
    }

    void fail(SolveStatus status, std::size_t step, std::string message) {
        traj_.status = status;
        traj_.failed_step = step;
        traj_.message = std::move(message);
    }

    PropagatorTrajectory finish() && { return std::move(traj_); }

private:
    double threshold_;
    PropagatorTrajectory traj_;
};

std::string corrector_message(std::size_t step, double delta) {
    std::ostringstream msg;
    msg << "corrector did not converge at step " << step << " (last update " << delta << ")";
    return msg.str();
}

// Integrating-factor trapezoid for ∂t V = L V + I(t), I(t) = ∫₀ᵗ S(t−s) V(s) ds:
//
//     V_{n+1} = E V_n + (h/2) [E I_n + I_{n+1}],   E = e^{Lh},
//
// with the memory integral itself on the trapezoid rule. The scheme is exact
// when the kernel vanishes. The history part of I_{n+1} (nodes 1…n) is one
// block GEMM over a reversed copy of the stored maps; only the two endpoint
// terms depend on the unknown V_{n+1} and are resolved by fixed-point iteration.
template <class KernelAt>
PropagatorTrajectory volterra_solve(Method method, const ModelSpec& model, const CorrelationTable& bath,
                                    std::size_t n_steps, const SolverOptions& opts, KernelAt&& kernel_at,
                                    bool self_consistent) {
    model.validate();
    require_grid(bath, n_steps);
    const double h = bath.dt;
    const auto d2 = static_cast<Eigen::Index>(model.dim() * model.dim());
    const auto total = static_cast<Eigen::Index>(n_steps + 1);

    const SuperOperator lsys = qops::liouvillian(model.hamiltonian);
    const SuperOperator e_step = qops::NormalExponential(lsys).at(h);

    // Block k of kernel_row holds S_k; block (N − m) of history holds V_m.
    Eigen::MatrixXcd kernel_row = Eigen::MatrixXcd::Zero(d2, total * d2);
    Eigen::MatrixXcd history = Eigen::MatrixXcd::Zero(total * d2, d2);
    auto kernel_block = [&](std::size_t k) { return kernel_row.middleCols(static_cast<Eigen::Index>(k) * d2, d2); };
    auto map_block = [&](std::size_t m) {
        return history.middleRows((total - 1 - static_cast<Eigen::Index>(m)) * d2, d2);
    };

    TrajectoryBuilder out(method, h, opts, n_steps);
    const SuperOperator ident = SuperOperator::Identity(d2, d2);
    map_block(0) = ident;
    kernel_block(0) = kernel_at(0, ident);
    if (!self_consistent) {
        for (std::size_t k = 1; k <= n_steps; ++k) {
            kernel_block(k) = kernel_at(k, ident);
        }
    }
    out.push(0, ident);

    SuperOperator current = ident;
    SuperOperator integral = SuperOperator::Zero(d2, d2);       // I_n
    SuperOperator integral_prev = SuperOperator::Zero(d2, d2);  // I_{n-1}
    const SuperOperator s0 = kernel_block(0);

    for (std::size_t n = 0; n < n_steps; ++n) {
        const auto nn = static_cast<Eigen::Index>(n);
        SuperOperator hist = SuperOperator::Zero(d2, d2);
        if (n >= 1) {
            hist.noalias() = kernel_row.middleCols(d2, nn * d2) *
                             history.middleRows((total - 1 - nn) * d2, nn * d2);
        }
        const SuperOperator base = e_step * (current + 0.5 * h * integral);
        SuperOperator guess = n >= 1 ? SuperOperator(2.0 * integral - integral_prev) : integral;
        SuperOperator next = base + 0.5 * h * guess;

        SuperOperator s_next = kernel_block(n + 1);
        bool converged = false;
        double delta = 0.0;
        for (int it = 0; it < opts.max_corrector_iterations; ++it) {
            if (self_consistent) {
                s_next = kernel_at(n + 1, next);
            }
            const SuperOperator i_next = h * (hist + 0.5 * s_next + 0.5 * s0 * next);
            const SuperOperator updated = base + 0.5 * h * i_next;
            delta = (updated - next).cwiseAbs().maxCoeff();
            next = updated;
            if (!std::isfinite(delta)) {
                break;
            }
            if (delta < opts.corrector_tol) {
                converged = true;
                break;
            }
        }
        if (blown_up(next, opts.blowup_threshold)) {
            out.push(n + 1, next);  // records the divergence
            break;
        }
        if (!converged) {
            out.fail(SolveStatus::not_converged, n + 1, corrector_message(n + 1, delta));
            break;
        }
        if (self_consistent) {
            s_next = kernel_at(n + 1, next);
            kernel_block(n + 1) = s_next;
        }
        map_block(n + 1) = next;
        integral_prev = integral;
        integral = h * (hist + 0.5 * s_next + 0.5 * s0 * next);
        current = next;
        if (!out.push(n + 1, next)) {
            break;
        }
    }
    return std::move(out).finish();
}

Operator propagate_operator(const Eigen::MatrixXcd& vectors, const Eigen::VectorXd& energies, double tau,
                            const Operator& x) {
    // e^{−iHτ} X e^{iHτ}
    const Eigen::VectorXcd phase = (complex(0.0, -1.0) * tau * energies.cast<complex>()).array().exp();
    const Operator u = vectors * phase.asDiagonal() * vectors.adjoint();
    return u * x * u.adjoint();
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
    case Method::nca: return "nca";
    case Method::nca_markov: return "nca_markov";
    case Method::born: return "born";
    case Method::born_markov: return "born_markov";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (auto m : {Method::nca, Method::nca_markov, Method::born, Method::born_markov}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

bool is_time_local(Method m) { return m == Method::nca_markov || m == Method::born_markov; }

std::string_view to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::completed: return "completed";
    case SolveStatus::diverged: return "diverged";
    case SolveStatus::not_converged: return "not_converged";
    }
    return "unknown";
}

ModelSpec ModelSpec::spin_boson(double delta, double epsilon) {
    ModelSpec m;
    m.delta = delta;
    m.epsilon = epsilon;
    m.hamiltonian = 0.5 * delta * qops::sigma_x() + 0.5 * epsilon * qops::sigma_z();
    m.couplings = {qops::sigma_z()};
    return m;
}

const Operator& ModelSpec::coupling() const {
    if (couplings.size() != 1) {
        throw std::invalid_argument("model: exactly one coupling operator is supported, got " +
                                    std::to_string(couplings.size()));
    }
    return couplings.front();
}

void ModelSpec::validate() const {
    if (hamiltonian.rows() == 0 || hamiltonian.rows() != hamiltonian.cols()) {
        throw DimensionError("model: Hamiltonian must be a non-empty square matrix");
    }
    if (!qops::is_hermitian(hamiltonian, qops::kAlgebraicTol)) {
        throw std::invalid_argument("model: Hamiltonian is not Hermitian");
    }
    const Operator& x = coupling();
    if (x.rows() != hamiltonian.rows() || x.cols() != hamiltonian.cols()) {
        throw DimensionError("model: coupling operator and Hamiltonian dimensions differ");
    }
    if (!qops::is_hermitian(x, qops::kAlgebraicTol)) {
        throw std::invalid_argument("model: coupling operator is not Hermitian");
    }
}

SuperOperator nca_kernel(const SuperOperator& v_tau, complex gamma_tau, const Operator& x) {
    const SuperOperator xl = qops::left_mult(x);
    const SuperOperator xr = qops::right_mult(x);
    if (v_tau.rows() != xl.rows() || v_tau.cols() != xl.cols()) {
        throw DimensionError("nca_kernel: superoperator size " + std::to_string(v_tau.rows()) +
                             " does not match coupling operator of dimension " + std::to_string(x.rows()));
    }
    return (xr - xl) * v_tau * (gamma_tau * xl - std::conj(gamma_tau) * xr);
}

SuperOperator born_kernel(double tau, const ModelSpec& model, const CorrelationTable& bath) {
    model.validate();
    const double index = tau / bath.dt;
    const auto n = static_cast<std::size_t>(std::llround(index));
    if (tau < 0.0 || std::abs(index - static_cast<double>(n)) > 1e-9 * std::max(1.0, index) || n >= bath.size()) {
        throw std::invalid_argument("born_kernel: tau=" + std::to_string(tau) + " is not on the table grid");
    }
    const SuperOperator v0 = qops::superop_exp(qops::liouvillian(model.hamiltonian), static_cast<double>(n) * bath.dt);
    return nca_kernel(v0, bath[n], model.coupling());
}

SuperOperator born_kernel_laplace(const ModelSpec& model, const bath::BathSpec& bath_spec, complex z) {
    model.validate();
    using qops::left_mult;
    using qops::right_mult;
    Eigen::SelfAdjointEigenSolver<Operator> es(model.hamiltonian);
    const Operator& x = model.coupling();
    const SuperOperator xl = left_mult(x);
    const SuperOperator xr = right_mult(x);
    const auto d = es.eigenvalues().size();
    SuperOperator out = SuperOperator::Zero(xl.rows(), xl.cols());
    for (Eigen::Index i = 0; i < d; ++i) {
        const Operator pi = es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
        for (Eigen::Index j = 0; j < d; ++j) {
            const Operator pj = es.eigenvectors().col(j) * es.eigenvectors().col(j).adjoint();
            // e^{Lτ} on |i⟩⟨j| is e^{−iω_ij τ}
            const double wij = es.eigenvalues()(i) - es.eigenvalues()(j);
            const complex shift(0.0, wij);
            const complex g_plus = bath::laplace_correlation(bath_spec, z + shift);
            const complex g_minus = std::conj(bath::laplace_correlation(bath_spec, std::conj(z) - shift));
            out += (xr - xl) * left_mult(pi) * right_mult(pj) * (g_plus * xl - g_minus * xr);
        }
    }
    return out;
}

KernelTrajectory born_kernels(const ModelSpec& model, const CorrelationTable& bath, std::size_t n_steps) {
    model.validate();
    if (bath.size() < n_steps + 1) {
        throw std::invalid_argument("born_kernels: bath table too short");
    }
    const qops::NormalExponential free(qops::liouvillian(model.hamiltonian));
    KernelTrajectory out;
    out.dt = bath.dt;
    out.kernels.reserve(n_steps + 1);
    for (std::size_t n = 0; n <= n_steps; ++n) {
        out.kernels.push_back(nca_kernel(free.at(static_cast<double>(n) * bath.dt), bath[n], model.coupling()));
    }
    return out;
}

PropagatorTrajectory solve_nca(const ModelSpec& model, const CorrelationTable& bath, std::size_t n_steps,
                               const SolverOptions& opts) {
    const Operator& x = model.coupling();
    auto kernel_at = [&](std::size_t n, const SuperOperator& v) { return nca_kernel(v, bath[n], x); };
    return volterra_solve(Method::nca, model, bath, n_steps, opts, kernel_at, true);
}

PropagatorTrajectory solve_born(const ModelSpec& model, const CorrelationTable& bath, std::size_t n_steps,
                                const SolverOptions& opts) {
    require_grid(bath, n_steps);
    const KernelTrajectory kernels = born_kernels(model, bath, n_steps);
    auto kernel_at = [&](std::size_t n, const SuperOperator&) { return kernels.kernels[n]; };
    return volterra_solve(Method::born, model, bath, n_steps, opts, kernel_at, false);
}

// Midpoint-exponential stepping V_{n+1} = exp[(L + M_{n+½}) h] V_n with
// M_{n+½} = (M_n + M_{n+1})/2 and M on the trapezoid rule. K_{n+1} depends on
// V_{n+1} through the NCA kernel, hence the predictor/corrector loop.
PropagatorTrajectory solve_nca_markov(const ModelSpec& model, const CorrelationTable& bath, std::size_t n_steps,
                                      const SolverOptions& opts) {
    model.validate();
    require_grid(bath, n_steps);
    const double h = bath.dt;
    const Operator& x = model.coupling();
    const auto d2 = static_cast<Eigen::Index>(model.dim() * model.dim());
    const SuperOperator lsys = qops::liouvillian(model.hamiltonian);
    const qops::NormalExponential free(lsys);
    auto markov_kernel = [&](std::size_t n, const SuperOperator& v) {
        return SuperOperator(nca_kernel(v, bath[n], x) * free.at(-static_cast<double>(n) * h));
    };

    TrajectoryBuilder out(Method::nca_markov, h, opts, n_steps);
    const SuperOperator ident = SuperOperator::Identity(d2, d2);
    SuperOperator current = ident;
    SuperOperator accumulated = SuperOperator::Zero(d2, d2);  // M_n
    SuperOperator k_curr = markov_kernel(0, ident);
    SuperOperator k_prev = k_curr;
    std::size_t start = 0;
    out.push(0, ident);

    if (opts.nca_seed_steps > 0) {
        const std::size_t seed = std::min(opts.nca_seed_steps, n_steps);
        SolverOptions seed_opts = opts;
        seed_opts.stride = 1;
        PropagatorTrajectory seeded = solve_nca(model, bath, seed, seed_opts);
        if (!seeded.ok()) {
            seeded.method = Method::nca_markov;
            return seeded;
        }
        for (std::size_t n = 1; n <= seed; ++n) {
            k_prev = k_curr;
            k_curr = markov_kernel(n, seeded.maps[n]);
            accumulated += 0.5 * h * (k_prev + k_curr);
            out.push(n, seeded.maps[n]);
        }
        current = seeded.maps[seed];
        start = seed;
    }

    for (std::size_t n = start; n < n_steps; ++n) {
        SuperOperator k_next = n >= 1 ? SuperOperator(2.0 * k_curr - k_prev) : k_curr;
        SuperOperator next = qops::superop_exp(lsys + accumulated + 0.25 * h * (k_curr + k_next), h) * current;
        bool converged = false;
        double delta = 0.0;
        for (int it = 0; it < opts.max_corrector_iterations; ++it) {
            k_next = markov_kernel(n + 1, next);
            const SuperOperator gen = lsys + accumulated + 0.25 * h * (k_curr + k_next);
            if (!gen.allFinite()) {
                break;
            }
            const SuperOperator updated = qops::superop_exp(gen, h) * current;
            delta = (updated - next).cwiseAbs().maxCoeff();
            next = updated;
            if (!std::isfinite(delta)) {
                break;
            }
            if (delta < opts.corrector_tol) {
                converged = true;
                break;
            }
        }
        if (blown_up(next, opts.blowup_threshold)) {
            out.push(n + 1, next);
            break;
        }
        if (!converged) {
            out.fail(SolveStatus::not_converged, n + 1, corrector_message(n + 1, delta));
            break;
        }
        k_prev = k_curr;
        k_curr = markov_kernel(n + 1, next);
        accumulated += 0.5 * h * (k_prev + k_curr);
        current = next;
        if (!out.push(n + 1, next)) {
            break;
        }
    }
    return std::move(out).finish();
}

Operator filtered_operator(const ModelSpec& model, const CorrelationTable& bath, std::size_t n) {
    model.validate();
    if (bath.size() < n + 1) {
        throw std::invalid_argument("filtered_operator: bath table too short");
    }
    Eigen::SelfAdjointEigenSolver<Operator> es(model.hamiltonian);
    const Operator& x = model.coupling();
    Operator sum = Operator::Zero(x.rows(), x.cols());
    for (std::size_t k = 0; k <= n; ++k) {
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        sum += w * bath[k] *
               propagate_operator(es.eigenvectors(), es.eigenvalues(), static_cast<double>(k) * bath.dt, x);
    }
    return n == 0 ? Operator(Operator::Zero(x.rows(), x.cols())) : Operator(bath.dt * sum);
}

SuperOperator born_markov_generator(const ModelSpec& model, const Operator& filtered) {
    using qops::left_mult;
    using qops::right_mult;
    const Operator& x = model.coupling();
    const Operator ft = filtered.adjoint();
    return qops::liouvillian(model.hamiltonian) - left_mult(x * filtered) + left_mult(filtered) * right_mult(x) +
           left_mult(x) * right_mult(ft) - right_mult(ft * x);
}

PropagatorTrajectory solve_born_markov(const ModelSpec& model, const CorrelationTable& bath, std::size_t n_steps,
                                       const SolverOptions& opts) {
    model.validate();
    require_grid(bath, n_steps);
    const double h = bath.dt;
    const Operator& x = model.coupling();
    const auto d2 = static_cast<Eigen::Index>(model.dim() * model.dim());
    Eigen::SelfAdjointEigenSolver<Operator> es(model.hamiltonian);
    auto weighted = [&](std::size_t n) {
        return Operator(bath[n] * propagate_operator(es.eigenvectors(), es.eigenvalues(),
                                                     static_cast<double>(n) * h, x));
    };

    TrajectoryBuilder out(Method::born_markov, h, opts, n_steps);
    SuperOperator current = SuperOperator::Identity(d2, d2);
    out.push(0, current);
    Operator filtered = Operator::Zero(x.rows(), x.cols());
    Operator term = weighted(0);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const Operator term_next = weighted(n + 1);
        const Operator filtered_next = filtered + 0.5 * h * (term + term_next);
        const SuperOperator gen = born_markov_generator(model, 0.5 * (filtered + filtered_next));
        current = qops::superop_exp(gen, h) * current;
        filtered = filtered_next;
        term = term_next;
        if (!out.push(n + 1, current)) {
            break;
        }
    }
    return std::move(out).finish();
}

PropagatorTrajectory solve(Method method, const ModelSpec& model, const CorrelationTable& bath, std::size_t n_steps,
                           const SolverOptions& opts) {
    switch (method) {
    case Method::nca: return solve_nca(model, bath, n_steps, opts);
    case Method::nca_markov: return solve_nca_markov(model, bath, n_steps, opts);
    case Method::born: return solve_born(model, bath, n_steps, opts);
    case Method::born_markov: return solve_born_markov(model, bath, n_steps, opts);
    }
    throw std::invalid_argument("solve: unknown method");
}

KernelTrajectory nca_kernels(const PropagatorTrajectory& traj, const ModelSpec& model, const CorrelationTable& bath) {
    if (traj.stride != 1) {
        throw std::invalid_argument("nca_kernels: trajectory must be stored with stride 1");
    }
    if (bath.size() < traj.size()) {
        throw std::invalid_argument("nca_kernels: bath table shorter than trajectory");
    }
    KernelTrajectory out;
    out.dt = traj.dt;
    out.kernels.reserve(traj.size());
    for (std::size_t n = 0; n < traj.size(); ++n) {
        out.kernels.push_back(nca_kernel(traj.maps[n], bath[n], model.coupling()));
    }
    return out;
}

KernelTrajectory markovian_kernels(const KernelTrajectory& kernels, const ModelSpec& model) {
    const qops::NormalExponential free(qops::liouvillian(model.hamiltonian));
    KernelTrajectory out;
    out.dt = kernels.dt;
    out.kernels.reserve(kernels.kernels.size());
    for (std::size_t n = 0; n < kernels.kernels.size(); ++n) {
        out.kernels.push_back(kernels.kernels[n] * free.at(-static_cast<double>(n) * kernels.dt));
    }
    return out;
}

KernelTrajectory stationary_kernels(Method method, const PropagatorTrajectory& traj, const ModelSpec& model,
                                    const CorrelationTable& bath) {
    const std::size_t n = traj.stride == 1 ? traj.size() - 1 : traj.last_step;
    switch (method) {
    case Method::nca: return nca_kernels(traj, model, bath);
    case Method::nca_markov: return markovian_kernels(nca_kernels(traj, model, bath), model);
    case Method::born: return born_kernels(model, bath, n);
    case Method::born_markov: return markovian_kernels(born_kernels(model, bath, n), model);
    }
    throw std::invalid_argument("stationary_kernels: unknown method");
}

ConvergenceStudy convergence_study(Method method, const ModelSpec& model, const bath::BathSpec& bath_spec,
                                   const std::vector<double>& dt_list, double t_max, const SolverOptions& opts,
                                   const std::optional<Operator>& observable, const std::optional<Operator>& rho0) {
    if (dt_list.size() < 2) {
        throw std::invalid_argument("convergence_study: need at least two time steps");
    }
    const Operator obs = observable.value_or(model.coupling());
    const Operator init = rho0.value_or(qops::projector_down());
    const OpVector v0 = qops::vectorize(init);

    ConvergenceStudy study;
    study.dts = dt_list;
    std::vector<std::vector<double>> series;
    for (std::size_t i = 0; i < dt_list.size(); ++i) {
        const double dt = dt_list[i];
        if (i > 0 && !(dt < dt_list[i - 1])) {
            throw std::invalid_argument("convergence_study: dt_list must be strictly descending");
        }
        const double steps = t_max / dt;
        const auto n = static_cast<std::size_t>(std::llround(steps));
        if (n == 0 || std::abs(steps - static_cast<double>(n)) > 1e-6) {
            throw std::invalid_argument("convergence_study: t_max is not a multiple of dt=" + std::to_string(dt));
        }
        SolverOptions run_opts = opts;
        run_opts.stride = 1;
        const auto table = bath::tabulate(bath_spec, dt, n);
        const auto traj = solve(method, model, table, n, run_opts);
        study.status.push_back(traj.status);
        std::vector<double> values;
        values.reserve(traj.size());
        for (const auto& v : traj.maps) {
            values.push_back(qops::expectation(obs, qops::devectorize(v * v0)));
        }
        series.push_back(std::move(values));
    }

    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const double ratio = dt_list[i] / dt_list[i + 1];
        const auto r = static_cast<std::size_t>(std::llround(ratio));
        if (std::abs(ratio - static_cast<double>(r)) > 1e-9) {
            throw std::invalid_argument("convergence_study: successive dts must be integer multiples");
        }
        double sup = 0.0;
        const auto& coarse = series[i];
        const auto& fine = series[i + 1];
        bool complete = study.status[i] == SolveStatus::completed && study.status[i + 1] == SolveStatus::completed;
        for (std::size_t k = 0; k < coarse.size() && k * r < fine.size(); ++k) {
            sup = std::max(sup, std::abs(coarse[k] - fine[k * r]));
        }
        study.sup_diffs.push_back(complete ? sup : std::numeric_limits<double>::quiet_NaN());
    }
    for (std::size_t j = 0; j + 1 < study.sup_diffs.size(); ++j) {
        study.orders.push_back(std::log(study.sup_diffs[j] / study.sup_diffs[j + 1]) /
                               std::log(dt_list[j] / dt_list[j + 1]));
    }
    // Least-squares slope of log d_j against log dt_j.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto m = static_cast<double>(study.sup_diffs.size());
    for (std::size_t j = 0; j < study.sup_diffs.size(); ++j) {
        const double lx = std::log(dt_list[j]);
        const double ly = std::log(study.sup_diffs[j]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = m * sxx - sx * sx;
    study.fitted_order = denom != 0.0 ? (m * sxy - sx * sy) / denom : std::numeric_limits<double>::quiet_NaN();
    return study;
}

}  // namespace ncamaps::dyn
