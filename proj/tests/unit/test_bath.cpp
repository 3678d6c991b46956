#include <doctest.h>

#include "ncamaps/bath.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace ncamaps;

namespace {

// Γ(τ) from a discretized bath: N modes at midpoints ω_k, weights J(ω_k)Δω/4π.
complex discrete_modes(const bath::BathSpec& spec, double tau, int n_modes = 100000) {
    const double dw = spec.omega_c / n_modes;
    complex sum = 0.0;
    for (int k = 0; k < n_modes; ++k) {
        const double w = (k + 0.5) * dw;
        const double j = bath::spectral_density(spec, w);
        double n_occ = 0.0;
        if (spec.temperature > 0) {
            n_occ = 1.0 / std::expm1(w / spec.temperature);
        }
        sum += j * dw / (4 * std::numbers::pi) *
               ((n_occ + 1) * std::exp(complex(0, -w * tau)) + n_occ * std::exp(complex(0, w * tau)));
    }
    return sum;
}

}  // namespace

TEST_SUITE("bath") {

TEST_CASE("spectral density: linear with a sharp cutoff") {
    bath::BathSpec spec;
    spec.alpha = 0.3;
    CHECK(bath::spectral_density(spec, 0.5) == doctest::Approx(2 * std::numbers::pi * 0.3 * 0.5));
    CHECK(bath::spectral_density(spec, 1.5) == 0.0);
    CHECK(bath::spectral_density(spec, -0.2) == 0.0);
}

TEST_CASE("zero-temperature correlation agrees with a discrete-mode bath") {
    bath::BathSpec spec;
    spec.alpha = 0.2;
    CHECK(bath::correlation(spec, 0.0).real() == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(std::abs(bath::correlation(spec, 0.0).imag()) < 1e-15);
    for (double tau : {0.01, 0.3, 1.0, 4.7, 12.0, 60.0}) {
        const complex ref = discrete_modes(spec, tau);
        CHECK(std::abs(bath::correlation(spec, tau) - ref) < 1e-9);
        CHECK(std::abs(bath::correlation(spec, -tau) - std::conj(ref)) < 1e-9);
    }
}

TEST_CASE("thermal correlation agrees with a discrete-mode bath") {
    bath::BathSpec spec;
    spec.alpha = 0.1;
    spec.temperature = 0.2;
    for (double tau : {0.0, 0.5, 3.0, 20.0}) {
        const complex ref = discrete_modes(spec, tau);
        CHECK(std::abs(bath::correlation(spec, tau) - ref) < 1e-8);
    }
}

TEST_CASE("Laplace transform agrees with frequency-side quadrature") {
    // Γ̃(z) = (α/2) ∫₀^{ω_c} ω / (z + iω) dω, integrated independently.
    bath::BathSpec spec;
    spec.alpha = 0.4;
    for (complex z : {complex(0.5, 0.0), complex(0.01, 0.3), complex(1e-4, -0.05), complex(2.0, 1.7)}) {
        auto re = [&](double w) { return (spec.alpha / 2 * w / (z + complex(0, w))).real(); };
        auto im = [&](double w) { return (spec.alpha / 2 * w / (z + complex(0, w))).imag(); };
        using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
        const complex ref(GK::integrate(re, 0.0, 1.0, 20, 1e-13), GK::integrate(im, 0.0, 1.0, 20, 1e-13));
        CHECK(std::abs(bath::laplace_correlation(spec, z) - ref) < 1e-10);
    }
    CHECK_THROWS_AS(bath::laplace_correlation(spec, complex(0.0, 1.0)), std::invalid_argument);
    spec.temperature = 0.1;
    CHECK_THROWS_AS(bath::laplace_correlation(spec, complex(1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("tabulation, correlation time and CSV cache round-trip") {
    bath::BathSpec spec;
    spec.alpha = 0.1;
    const auto table = bath::tabulate(spec, 0.05, 400);
    REQUIRE(table.size() == 401);
    CHECK(table[37] == bath::correlation(spec, 37 * 0.05));

    // Table too short to fall below 1%: Γ only decays as 1/τ.
    CHECK_FALSE(bath::correlation_time(table, 0.01).has_value());
    const auto tc = bath::correlation_time(table, 0.5);
    REQUIRE(tc.has_value());
    CHECK(std::abs(bath::correlation(spec, *tc)) < 0.5 * spec.alpha / 4);

    const auto path = std::filesystem::temp_directory_path() / "ncamaps_bath_roundtrip.csv";
    bath::write_correlation_csv(table, path);
    const auto back = bath::read_correlation_csv(path);
    std::filesystem::remove(path);
    CHECK(back.dt == table.dt);
    CHECK(back.spec.alpha == spec.alpha);
    REQUIRE(back.size() == table.size());
    for (std::size_t n = 0; n < table.size(); ++n) {
        CHECK(back[n] == table[n]);
    }
}

TEST_CASE("invalid bath parameters name the field") {
    bath::BathSpec spec;
    spec.alpha = -0.1;
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("bath.alpha"), std::invalid_argument);
    CHECK_THROWS_AS(bath::tabulate(bath::BathSpec{}, 0.0, 10), std::invalid_argument);
}

}  // TEST_SUITE
