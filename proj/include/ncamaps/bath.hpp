// bath.hpp — bosonic bath spectral densities and two-time correlation functions
//
// Units: ω_c sets the energy scale, times are in 1/ω_c (multiply by 2π to get
// the 2π/ω_c units used by the runner).

#pragma once

#include "ncamaps/qops.hpp"

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ncamaps::bath {

enum class SpectralKind { ohmic_sharp_cutoff };

struct BathSpec {
    SpectralKind kind = SpectralKind::ohmic_sharp_cutoff;
    double alpha = 0.0;        // dimensionless dissipation strength, α = λ²/(2ω_c²)
    double omega_c = 1.0;      // cutoff frequency
    double temperature = 0.0;  // k_B T in energy units

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Thrown when adaptive quadrature cannot reach the requested accuracy.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double error_estimate)
        : std::runtime_error(what), error_estimate_(error_estimate) {}
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

// J(ω) = 2π α ω θ(ω) θ(ω_c − ω)
double spectral_density(const BathSpec& spec, double omega);

// Γ(τ) = tr[B(τ) B(0) ρ_B] = (1/4π) ∫ dω J(ω) [(n(ω)+1) e^{−iωτ} + n(ω) e^{iωτ}].
// Closed form at T = 0, quadrature for the thermal part otherwise. Negative τ
// is served as conj(Γ(−τ)).
complex correlation(const BathSpec& spec, double tau);

struct CorrelationTable {
    BathSpec spec;
    double dt = 0.0;
    std::vector<complex> values;  // Γ(n·dt), n = 0…n_steps

    std::size_t size() const { return values.size(); }
    const complex& operator[](std::size_t n) const { return values[n]; }
};

// Γ̃(z) = ∫₀^∞ Γ(τ) e^{−zτ} dτ for Re z > 0, closed form (T = 0 only).
complex laplace_correlation(const BathSpec& spec, complex z);

CorrelationTable tabulate(const BathSpec& spec, double dt, std::size_t n_steps);

// Smallest tabulated τ with |Γ(τ)| < fraction·Γ(0); nullopt if the table is too
// short or Γ(0) vanishes.
std::optional<double> correlation_time(const CorrelationTable& table, double fraction = 0.01);

// Cache file: '#'-prefixed header with alpha, omega_c, temperature, dt, then
// CSV columns tau, re_gamma, im_gamma.
void write_correlation_csv(const CorrelationTable& table, const std::filesystem::path& path);
CorrelationTable read_correlation_csv(const std::filesystem::path& path);

}  // namespace ncamaps::bath
