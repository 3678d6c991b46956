#include <doctest.h>

#include "ncamaps/observables.hpp"

#include <cmath>
#include <numbers>

using namespace ncamaps;

namespace {

dyn::PropagatorTrajectory free_trajectory(const dyn::ModelSpec& model, double dt, std::size_t n) {
    bath::BathSpec spec;
    return dyn::solve_nca(model, bath::tabulate(spec, dt, n), n);
}

// γ D[σ−] with σ− = |↓⟩⟨↑|
SuperOperator amplitude_damping(double gamma) {
    Operator lower = Operator::Zero(2, 2);
    lower(1, 0) = 1.0;
    const Operator raise = lower.adjoint();
    const Operator n = raise * lower;
    return gamma * (qops::left_mult(lower) * qops::right_mult(raise) - 0.5 * qops::left_mult(n) -
                    0.5 * qops::right_mult(n));
}

// F(t) = e^{−iΩt − γt}, with closed-form transforms.
obs::ComplexSeries damped_rotation(double omega0, double gamma, double h, std::size_t n) {
    obs::ComplexSeries f;
    f.dt = h;
    for (std::size_t k = 0; k <= n; ++k) {
        f.values.push_back(std::exp(complex(-gamma, -omega0) * (k * h)));
    }
    return f;
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("expectations and diagnostics of the free evolution") {
    const auto model = dyn::ModelSpec::spin_boson(0.1);
    const auto tr = free_trajectory(model, 0.5, 100);
    const auto s = obs::evolve_expectations(tr, qops::projector_down(), {qops::sigma_x(), qops::sigma_z()},
                                            {"sx", "sz"});
    REQUIRE(s.size() == 2);
    CHECK(s[1].label == "sz");
    CHECK(s[1].dt == 0.5);
    for (std::size_t k = 0; k < s[1].size(); ++k) {
        CHECK(std::abs(s[0].values[k]) < 1e-14);
        CHECK(s[1].values[k] == doctest::Approx(-std::cos(0.1 * s[1].time(k))).epsilon(1e-12));
    }
    const auto d = obs::evolve_diagnostics(tr, qops::projector_down());
    CHECK(d.back().purity == doctest::Approx(1.0));
    CHECK(std::abs(d.back().min_eigenvalue) < 1e-12);
    CHECK_THROWS_AS(obs::evolve_expectations(tr, qops::identity(3), {qops::sigma_x()}), DimensionError);
}

TEST_CASE("steady state of an amplitude-damping generator is the ground state") {
    const auto model = dyn::ModelSpec::spin_boson(0.0, 0.3);
    dyn::KernelTrajectory k;
    k.dt = 0.1;
    // Constant kernel over a unit window integrates to the dissipator itself.
    k.kernels.assign(11, amplitude_damping(0.2));
    const auto ss = obs::steady_state(model, k);
    CHECK((ss.rho - qops::projector_down()).norm() < 1e-12);
    CHECK(ss.tail_fraction == doctest::Approx(0.1));
    CHECK(ss.separation_ratio > 1e8);
    CHECK_FALSE(ss.nearly_singular);

    const auto gen = obs::stationary_generator(model, k);
    CHECK((gen - qops::liouvillian(model.hamiltonian) - amplitude_damping(0.2)).norm() < 1e-14);
}

TEST_CASE("a generator with two stationary states is rejected") {
    const auto model = dyn::ModelSpec::spin_boson(0.0, 0.3);  // bare σz precession: every diagonal state is stationary
    dyn::KernelTrajectory k;
    k.dt = 0.1;
    k.kernels.assign(5, SuperOperator::Zero(4, 4));
    CHECK_THROWS_AS(obs::steady_state(model, k), obs::DegenerateSteadyState);
}

TEST_CASE("null-space steady state agrees with long-time NCA dynamics") {
    const auto model = dyn::ModelSpec::spin_boson(0.1);
    const double h = 0.1 * 2.0 * std::numbers::pi;
    const std::size_t n = 3000;  // t = 300 in units of 2π/ω_c
    for (auto m : {dyn::Method::nca, dyn::Method::nca_markov}) {
        for (double alpha : {0.1, 0.5}) {
            bath::BathSpec spec;
            spec.alpha = alpha;
            const auto table = bath::tabulate(spec, h, n);
            const auto tr = dyn::solve(m, model, table, n);
            REQUIRE(tr.ok());
            const auto ss = obs::steady_state(model, dyn::stationary_kernels(m, tr, model, table));
            const auto s = obs::evolve_expectations(tr, qops::projector_down(), {qops::sigma_x(), qops::sigma_z()});
            CHECK(std::abs(s[0].values.back() - qops::expectation(qops::sigma_x(), ss.rho)) < 1e-3);
            CHECK(std::abs(s[1].values.back() - qops::expectation(qops::sigma_z(), ss.rho)) < 1e-3);
        }
    }
}

TEST_CASE("regression correlation of the free spin") {
    const double delta = 0.1;
    const auto model = dyn::ModelSpec::spin_boson(delta);
    const auto tr = free_trajectory(model, 0.5, 200);
    // Ground state of (Δ/2)σx.
    Operator rho = 0.5 * (qops::identity(2) - qops::sigma_x());
    const auto f = obs::regression_correlation(tr, qops::sigma_z(), rho);
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double t = f.time(k);
        // Independent closed form: U = cos(Δt/2) − i sin(Δt/2) σx
        const Operator u = std::cos(delta * t / 2) * qops::identity(2) -
                           complex(0, 1) * std::sin(delta * t / 2) * qops::sigma_x();
        const complex ref = (qops::sigma_z() * u * qops::sigma_z() * rho * u.adjoint()).trace();
        CHECK(std::abs(f.values[k] - ref) < 1e-12);
        CHECK(std::abs(ref - std::exp(complex(0, -delta * t))) < 1e-12);
    }
}

TEST_CASE("C_z transform of a damped rotation is a difference of Lorentzians") {
    const double om = 0.3, gamma = 0.05, eta = 0.02;
    const auto f = damped_rotation(om, gamma, 0.01, 40000);
    const std::vector<double> w{0.0, 0.1, 0.29, 0.3, 0.31, 0.7};
    const auto s = obs::spectrum_cz(f, eta, w);
    CHECK_FALSE(s.short_window);
    const double g = gamma + eta;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double ref = g / (g * g + (w[j] - om) * (w[j] - om)) - g / (g * g + (w[j] + om) * (w[j] + om));
        CHECK(std::abs(s.values[j].real() - ref) < 1e-4);
        CHECK(std::abs(s.values[j].imag()) < 1e-12);
    }
}

TEST_CASE("susceptibility and transmission of a damped rotation") {
    const double om = 0.2, gamma = 0.03, eta = 0.002;
    const auto f = damped_rotation(om, gamma, 0.01, 60000);
    const std::vector<double> w{0.05, 0.2, 0.25};
    const auto r = obs::susceptibility_and_transmission(f, eta, w, 0.5);
    for (std::size_t j = 0; j < w.size(); ++j) {
        // χ(t) = 2 Im F = −2 e^{−γt} sin Ωt; Laplace at s = γ + η − iω.
        const complex s(gamma + eta, -w[j]);
        const complex chi = -2.0 * om / (s * s + om * om);
        CHECK(std::abs(r.chi.values[j] - chi) < 1e-4);
        const complex t = 1.0 - complex(0, 0.5 * w[j]) * chi;
        CHECK(std::abs(r.transmission.values[j] - t) < 1e-5);
        CHECK(r.t2[j] == doctest::Approx(std::norm(t)).epsilon(1e-4));
    }
}

TEST_CASE("short windows are flagged") {
    const auto f = damped_rotation(0.3, 0.0, 0.1, 100);  // T = 10
    const auto s = obs::spectrum_cz(f, 0.01, {0.3});
    CHECK(s.short_window);
    CHECK_FALSE(s.warning.empty());
    CHECK_THROWS_AS(obs::spectrum_cz(f, 0.0, {0.3}), std::invalid_argument);
}

TEST_CASE("Born resolvent spectrum is the long-window limit of the time-domain transform") {
    const auto model = dyn::ModelSpec::spin_boson(0.1);
    bath::BathSpec spec;
    spec.alpha = 0.1;
    const double eta = 0.05;
    const std::vector<double> w = obs::linspace(0.02, 0.2, 10);
    const auto res = obs::born_resolvent_spectrum(model, spec, eta, w);
    // Born stationary state at z → 0⁺ is the ground state of H_S.
    CHECK(qops::expectation(qops::sigma_x(), res.steady.rho) == doctest::Approx(-1.0).epsilon(1e-8));

    const std::size_t n = 4000;
    const auto tr = dyn::solve_born(model, bath::tabulate(spec, 0.1, n), n);
    REQUIRE(tr.ok());
    const auto f = obs::regression_correlation(tr, model.coupling(), res.steady.rho);
    const auto td = obs::spectrum_cz(f, eta, w);
    double peak = 0.0;
    for (const auto& v : res.cz.values) {
        peak = std::max(peak, std::abs(v));
    }
    for (std::size_t j = 0; j < w.size(); ++j) {
        CHECK(std::abs(td.values[j] - res.cz.values[j]) < 2e-3 * peak);
    }
}

TEST_CASE("classification and relaxation times") {
    obs::TimeSeries osc, mono;
    osc.dt = mono.dt = 0.1;
    for (int k = 0; k <= 2000; ++k) {
        const double t = 0.1 * k;
        osc.values.push_back(-std::exp(-0.05 * t) * std::cos(t));
        mono.values.push_back(-std::exp(-0.5 * t));
    }
    const auto c1 = obs::classify_dynamics(osc);
    CHECK(c1.kind == obs::DynamicsKind::coherent);
    CHECK(c1.zero_crossings > 10);
    CHECK(c1.settled);
    const auto c2 = obs::classify_dynamics(mono);
    CHECK(c2.kind == obs::DynamicsKind::incoherent);
    CHECK(c2.zero_crossings == 0);
    // First grid point with e^{−t/2} < 1/e is t = 2.1.
    CHECK(c2.decay_time == doctest::Approx(2.1));
    CHECK(obs::relaxation_time(mono, 0.01) == doctest::Approx(9.3));

    // Noise around zero inside the band is not a crossing.
    obs::TimeSeries noisy;
    noisy.dt = 1.0;
    noisy.values = {-1.0, -0.5, 0.005, -0.004, 0.003, -0.001};
    CHECK(obs::classify_dynamics(noisy).zero_crossings == 0);

    obs::TimeSeries stuck;
    stuck.dt = 1.0;
    stuck.values = {-1.0, -0.9, -0.8};
    CHECK(std::isinf(obs::relaxation_time(stuck, 0.5)));
    CHECK_FALSE(obs::classify_dynamics(stuck).settled);
    CHECK_THROWS_AS(obs::classify_dynamics(stuck, 1.5), std::invalid_argument);

    const auto g = obs::linspace(0.0, 1.0, 5);
    CHECK(g[3] == doctest::Approx(0.75));
}

}  // TEST_SUITE
