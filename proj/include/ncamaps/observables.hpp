// observables.hpp — expectation values, steady states, regression correlations,
// spectra, transmission and simple dynamics analyzers.
//
// Times here are in the solver's units (1/ω_c); frequencies in ω_c.

#pragma once

#include "ncamaps/dynmaps.hpp"
#include "ncamaps/qops.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncamaps::obs {

struct TimeSeries {
    double dt = 0.0;
    std::vector<double> values;
    std::string label;

    std::size_t size() const { return values.size(); }
    double time(std::size_t k) const { return dt * static_cast<double>(k); }
};

struct ComplexSeries {
    double dt = 0.0;
    std::vector<complex> values;
    std::string label;

    std::size_t size() const { return values.size(); }
    double time(std::size_t k) const { return dt * static_cast<double>(k); }
};

// tr[O_i V̂(t_n) ρ₀] for each operator; labels default to "o0", "o1", …
std::vector<TimeSeries> evolve_expectations(const dyn::PropagatorTrajectory& traj, const Operator& rho0,
                                            const std::vector<Operator>& ops,
                                            const std::vector<std::string>& labels = {});
std::vector<qops::DensityDiagnostics> evolve_diagnostics(const dyn::PropagatorTrajectory& traj,
                                                         const Operator& rho0);

struct SteadyState {
    Operator rho;
    // σ_{second smallest} / σ_{smallest} of the stationary generator; large is good.
    double separation_ratio = std::numeric_limits<double>::infinity();
    bool nearly_singular = false;  // separation_ratio < 10
    // ‖∫ over the last 10% of the kernel window‖ / ‖∫ over the whole window‖.
    double tail_fraction = 0.0;
};

// Thrown when the stationary generator has more than one null direction.
class DegenerateSteadyState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Null vector of L + ∫ Ŝ (trapezoid), Hermitized and trace-normalized.
SteadyState steady_state(const dyn::ModelSpec& model, const dyn::KernelTrajectory& kernels);
SuperOperator stationary_generator(const dyn::ModelSpec& model, const dyn::KernelTrajectory& kernels);

// F(t_n) = tr[X V̂(t_n)(X ρ_s)]
ComplexSeries regression_correlation(const dyn::PropagatorTrajectory& traj, const Operator& x,
                                     const Operator& rho_s);

struct Spectrum {
    std::vector<double> omega;
    std::vector<complex> values;
    double eta = 0.0;
    double window = 0.0;          // T, the last sample time
    bool short_window = false;    // e^{−ηT} > 1e-3
    std::string warning;
};

// C_z(ω) = ∫_{−T}^{T} e^{iωt − η|t|} C_z(t) dt with C_z(t) = (F − F*)/2, trapezoid.
// Both half-lines are summed explicitly so the imaginary part measures the
// symmetry of the input rather than being zero by construction.
Spectrum spectrum_cz(const ComplexSeries& f, double eta, const std::vector<double>& omega);

// Born map in the Laplace domain: ρ_s from L + S̃(0⁺) and C_z(ω) from the
// resolvent [z − L − S̃(z)]⁻¹ at z = η ∓ iω. This is spectrum_cz in the limit
// T → ∞, reachable at damping far below what a finite window allows.
struct ResolventSpectrum {
    SteadyState steady;
    Spectrum cz;
};
ResolventSpectrum born_resolvent_spectrum(const dyn::ModelSpec& model, const bath::BathSpec& bath, double eta,
                                          const std::vector<double>& omega);

struct Response {
    Spectrum chi;                 // χ(ω) = ∫₀^T e^{iωt − ηt} χ(t) dt, χ(t) = −i(F − F*)
    Spectrum transmission;        // T(ω) = 1 − i N ω χ(ω)
    std::vector<double> t2;       // |T(ω)|²
};

Response susceptibility_and_transmission(const ComplexSeries& f, double eta, const std::vector<double>& omega,
                                         double n_coupling = 1.0);

enum class DynamicsKind { coherent, incoherent };
std::string_view to_string(DynamicsKind k);

struct Classification {
    DynamicsKind kind = DynamicsKind::incoherent;
    int zero_crossings = 0;
    double decay_time = std::numeric_limits<double>::infinity();  // relaxation_time at 1/e
    bool settled = false;  // |s| ends up and stays below band·|s0|
};

// Zero crossings are counted with hysteresis: the signal has to travel from
// below −band·|s0| to above +band·|s0| (or back). Coherent iff ≥ 2 crossings.
Classification classify_dynamics(const TimeSeries& s, double band = 0.01);

// First time after which |s| stays below threshold·|s(0)|; +∞ if never.
double relaxation_time(const TimeSeries& s, double threshold);

// Uniform grid lo, lo+step, …, hi (inclusive within round-off).
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace ncamaps::obs
