// dynmaps.hpp — NCA, NCA-Markov, Born and Born-Markov dynamical maps
//
// All four solvers propagate the evolution superoperator V̂(t), ρ(t) = V̂(t)ρ(0),
// on a uniform grid t_n = n·dt taken from the bath correlation table. The
// time-nonlocal solvers (NCA, Born) integrate
//
//     ∂t V̂(t) = L V̂(t) + ∫₀ᵗ dt₁ Ŝ(t − t₁) V̂(t₁)
//
// and the time-local ones (NCA-Markov, Born-Markov) integrate
//
//     ∂t V̂(t) = [L + M(t)] V̂(t),   M(t) = ∫₀ᵗ dτ Ŝ(τ) e^{−Lτ},
//
// where L = −i[H_S, •] and the kernel Ŝ is either the self-consistent NCA
// self-energy or its Born counterpart with V̂(τ) → e^{Lτ}.

#pragma once

#include "ncamaps/bath.hpp"
#include "ncamaps/qops.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ncamaps::dyn {

enum class Method { nca, nca_markov, born, born_markov };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);
bool is_time_local(Method m);

struct ModelSpec {
    double delta = 0.1;    // tunneling Δ, units of ω_c
    double epsilon = 0.0;  // bias ε, units of ω_c
    // Only a single coupling operator is implemented; the list keeps room for more.
    std::vector<Operator> couplings;
    Operator hamiltonian;

    // H_S = (Δ/2)σx + (ε/2)σz, X = σz.
    static ModelSpec spin_boson(double delta, double epsilon = 0.0);

    const Operator& coupling() const;
    std::size_t dim() const { return static_cast<std::size_t>(hamiltonian.rows()); }
    void validate() const;
};

enum class SolveStatus { completed, diverged, not_converged };
std::string_view to_string(SolveStatus s);

struct SolverOptions {
    double corrector_tol = 1e-10;        // max-norm on the V̂ update
    int max_corrector_iterations = 25;
    std::size_t stride = 1;              // keep every stride-th map
    double blowup_threshold = 1e6;       // |entry| above this counts as divergence
    std::size_t nca_seed_steps = 0;      // NCA-Markov only: first steps run with full NCA
};

struct PropagatorTrajectory {
    Method method = Method::nca;
    double dt = 0.0;                      // grid step of the solve
    std::size_t stride = 1;
    std::vector<SuperOperator> maps;      // V̂(k·stride·dt)
    SolveStatus status = SolveStatus::completed;
    std::size_t last_step = 0;            // last grid index successfully computed
    std::size_t failed_step = 0;          // grid index of the failure, if any
    std::string message;

    bool ok() const { return status == SolveStatus::completed; }
    std::size_t size() const { return maps.size(); }
    double sample_dt() const { return dt * static_cast<double>(stride); }
    double time(std::size_t k) const { return sample_dt() * static_cast<double>(k); }
    // Time of the failing step; only meaningful when !ok().
    double failure_time() const { return dt * static_cast<double>(failed_step); }
};

struct KernelTrajectory {
    double dt = 0.0;
    std::vector<SuperOperator> kernels;  // Ŝ(n·dt)
};

// (−X̂₊ + X̂₋) V̂(τ) [Γ(τ) X̂₊ − Γ*(τ) X̂₋]
SuperOperator nca_kernel(const SuperOperator& v_tau, complex gamma_tau, const Operator& x);

// nca_kernel with V̂(τ) = e^{Lτ}. tau must lie on the table grid.
SuperOperator born_kernel(double tau, const ModelSpec& model, const bath::CorrelationTable& bath);

// ∫₀^∞ Ŝ_Born(τ) e^{−zτ} dτ, Re z > 0, via the eigenbasis of H_S and the
// closed-form Laplace transform of Γ.
SuperOperator born_kernel_laplace(const ModelSpec& model, const bath::BathSpec& bath, complex z);

PropagatorTrajectory solve_nca(const ModelSpec& model, const bath::CorrelationTable& bath,
                               std::size_t n_steps, const SolverOptions& opts = {});
PropagatorTrajectory solve_nca_markov(const ModelSpec& model, const bath::CorrelationTable& bath,
                                      std::size_t n_steps, const SolverOptions& opts = {});
PropagatorTrajectory solve_born(const ModelSpec& model, const bath::CorrelationTable& bath,
                                std::size_t n_steps, const SolverOptions& opts = {});
PropagatorTrajectory solve_born_markov(const ModelSpec& model, const bath::CorrelationTable& bath,
                                       std::size_t n_steps, const SolverOptions& opts = {});
PropagatorTrajectory solve(Method method, const ModelSpec& model, const bath::CorrelationTable& bath,
                           std::size_t n_steps, const SolverOptions& opts = {});

// Kernels Ŝ(τ_n), n = 0…n_steps.
KernelTrajectory born_kernels(const ModelSpec& model, const bath::CorrelationTable& bath, std::size_t n_steps);
// NCA kernels rebuilt from a stride-1 trajectory (NCA or NCA-Markov).
KernelTrajectory nca_kernels(const PropagatorTrajectory& traj, const ModelSpec& model,
                             const bath::CorrelationTable& bath);
// Ŝ(τ) e^{−Lτ}: integrating these gives the time-local generator correction M.
KernelTrajectory markovian_kernels(const KernelTrajectory& kernels, const ModelSpec& model);
// Kernels whose integral, added to L, is the stationary generator of `method`.
KernelTrajectory stationary_kernels(Method method, const PropagatorTrajectory& traj, const ModelSpec& model,
                                    const bath::CorrelationTable& bath);

// Filtered operator X̃(t_n) = ∫₀^{t_n} dτ Γ(τ) e^{−iHτ} X e^{iHτ} (trapezoid).
Operator filtered_operator(const ModelSpec& model, const bath::CorrelationTable& bath, std::size_t n);
// ρ ↦ −i[H, ρ] − X X̃ ρ + X̃ ρ X + X ρ X̃† − ρ X̃† X
SuperOperator born_markov_generator(const ModelSpec& model, const Operator& filtered);

struct ConvergenceStudy {
    std::vector<double> dts;          // as given, descending
    std::vector<SolveStatus> status;  // per dt
    std::vector<double> sup_diffs;    // between dts[i] and dts[i+1]
    std::vector<double> orders;       // local orders between successive sup_diffs
    double fitted_order = 0.0;        // least-squares slope of log sup_diff vs log dt
};

// Self-convergence of tr[O V̂(t) ρ₀] under grid refinement. Successive dts must
// divide each other and t_max. Defaults: O = coupling operator, ρ₀ = |↓⟩⟨↓|.
ConvergenceStudy convergence_study(Method method, const ModelSpec& model, const bath::BathSpec& bath,
                                   const std::vector<double>& dt_list, double t_max,
                                   const SolverOptions& opts = {},
                                   const std::optional<Operator>& observable = std::nullopt,
                                   const std::optional<Operator>& rho0 = std::nullopt);

}  // namespace ncamaps::dyn
