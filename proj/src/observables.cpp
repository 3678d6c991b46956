#include "ncamaps/observables.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ncamaps::obs {

namespace {

void require_density(const Operator& rho, std::size_t dim, const char* who) {
    if (static_cast<std::size_t>(rho.rows()) != dim || rho.rows() != rho.cols()) {
        throw DimensionError(std::string(who) + ": state dimension does not match the trajectory");
    }
}

double trapezoid_weight(std::size_t n, std::size_t last) { return (n == 0 || n == last) ? 0.5 : 1.0; }

Spectrum make_spectrum(const ComplexSeries& f, double eta, const std::vector<double>& omega) {
    if (!(eta > 0.0)) {
        throw std::invalid_argument("spectrum: eta must be > 0");
    }
    if (f.size() < 2 || !(f.dt > 0.0)) {
        throw std::invalid_argument("spectrum: need at least two samples on a positive time step");
    }
    Spectrum s;
    s.omega = omega;
    s.eta = eta;
    s.window = f.time(f.size() - 1);
    s.values.assign(omega.size(), complex(0.0, 0.0));
    const double residual = std::exp(-eta * s.window);
    if (residual > 1e-3) {
        s.short_window = true;
        std::ostringstream msg;
        msg << "damping window too short: exp(-eta*T) = " << residual << " > 1e-3";
        s.warning = msg.str();
    }
    return s;
}

SteadyState null_state(const SuperOperator& a) {
    Eigen::JacobiSVD<SuperOperator> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();  // descending
    const Eigen::Index m = sv.size();
    const double smallest = sv(m - 1);
    const double second = m >= 2 ? sv(m - 2) : std::numeric_limits<double>::infinity();
    const double scale = std::max(sv(0), 1e-300);
    if (second <= 1e-10 * scale) {
        std::ostringstream msg;
        msg << "steady_state: null space is degenerate (two smallest singular values " << smallest << ", "
            << second << " relative to " << sv(0) << ")";
        throw DegenerateSteadyState(msg.str());
    }

    SteadyState out;
    out.separation_ratio = smallest > 0.0 ? second / smallest : std::numeric_limits<double>::infinity();
    out.nearly_singular = out.separation_ratio < 10.0;
    Operator rho = qops::devectorize(svd.matrixV().col(m - 1));
    const complex tr = rho.trace();
    if (std::abs(tr) < 1e-14) {
        throw std::runtime_error("steady_state: null vector is traceless, cannot normalize");
    }
    rho /= tr;
    out.rho = 0.5 * (rho + rho.adjoint());
    out.rho /= out.rho.trace().real();
    return out;
}

}  // namespace

std::vector<TimeSeries> evolve_expectations(const dyn::PropagatorTrajectory& traj, const Operator& rho0,
                                            const std::vector<Operator>& ops,
                                            const std::vector<std::string>& labels) {
    if (traj.maps.empty()) {
        throw std::invalid_argument("evolve_expectations: empty trajectory");
    }
    const std::size_t dim = qops::operator_dim(traj.maps.front());
    require_density(rho0, dim, "evolve_expectations");
    if (!labels.empty() && labels.size() != ops.size()) {
        throw std::invalid_argument("evolve_expectations: labels and operators differ in number");
    }
    std::vector<TimeSeries> out(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) {
        require_density(ops[i], dim, "evolve_expectations");
        out[i].dt = traj.sample_dt();
        out[i].label = labels.empty() ? "o" + std::to_string(i) : labels[i];
        out[i].values.reserve(traj.size());
    }
    const OpVector v0 = qops::vectorize(rho0);
    for (const auto& v : traj.maps) {
        const Operator rho = qops::devectorize(v * v0);
        for (std::size_t i = 0; i < ops.size(); ++i) {
            out[i].values.push_back(qops::expectation(ops[i], rho));
        }
    }
    return out;
}

std::vector<qops::DensityDiagnostics> evolve_diagnostics(const dyn::PropagatorTrajectory& traj,
                                                         const Operator& rho0) {
    if (traj.maps.empty()) {
        return {};
    }
    require_density(rho0, qops::operator_dim(traj.maps.front()), "evolve_diagnostics");
    const OpVector v0 = qops::vectorize(rho0);
    std::vector<qops::DensityDiagnostics> out;
    out.reserve(traj.size());
    for (const auto& v : traj.maps) {
        out.push_back(qops::density_diagnostics(qops::devectorize(v * v0)));
    }
    return out;
}

SuperOperator stationary_generator(const dyn::ModelSpec& model, const dyn::KernelTrajectory& kernels) {
    SuperOperator a = qops::liouvillian(model.hamiltonian);
    const std::size_t n = kernels.kernels.size();
    if (n < 2) {
        throw std::invalid_argument("steady_state: need at least two kernel samples");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (kernels.kernels[k].rows() != a.rows()) {
            throw DimensionError("steady_state: kernel and model dimensions differ");
        }
        a += kernels.dt * trapezoid_weight(k, n - 1) * kernels.kernels[k];
    }
    return a;
}

SteadyState steady_state(const dyn::ModelSpec& model, const dyn::KernelTrajectory& kernels) {
    const SuperOperator a = stationary_generator(model, kernels);
    SteadyState out = null_state(a);

    // Size of the integral over the last 10% of the window relative to the whole.
    const std::size_t intervals = kernels.kernels.size() - 1;
    const std::size_t tail_start = intervals - std::max<std::size_t>(1, (intervals + 5) / 10);
    SuperOperator total = SuperOperator::Zero(a.rows(), a.cols());
    SuperOperator tail = SuperOperator::Zero(a.rows(), a.cols());
    for (std::size_t k = 0; k < intervals; ++k) {
        const SuperOperator piece = 0.5 * kernels.dt * (kernels.kernels[k] + kernels.kernels[k + 1]);
        total += piece;
        if (k >= tail_start) {
            tail += piece;
        }
    }
    const double total_norm = total.norm();
    out.tail_fraction = total_norm > 0.0 ? tail.norm() / total_norm : 0.0;
    return out;
}

ComplexSeries regression_correlation(const dyn::PropagatorTrajectory& traj, const Operator& x,
                                     const Operator& rho_s) {
    if (traj.maps.empty()) {
        throw std::invalid_argument("regression_correlation: empty trajectory");
    }
    const std::size_t dim = qops::operator_dim(traj.maps.front());
    require_density(rho_s, dim, "regression_correlation");
    require_density(x, dim, "regression_correlation");
    ComplexSeries f;
    f.dt = traj.sample_dt();
    f.label = "F";
    f.values.reserve(traj.size());
    const OpVector seed = qops::vectorize(x * rho_s);
    for (const auto& v : traj.maps) {
        f.values.push_back((x * qops::devectorize(v * seed)).trace());
    }
    return f;
}

Spectrum spectrum_cz(const ComplexSeries& f, double eta, const std::vector<double>& omega) {
    Spectrum s = make_spectrum(f, eta, omega);
    const std::size_t last = f.size() - 1;
    const double h = f.dt;
    for (std::size_t j = 0; j < omega.size(); ++j) {
        const double w = omega[j];
        complex acc = 0.5 * (f.values[0] - std::conj(f.values[0]));  // C(0), counted once
        for (std::size_t n = 1; n <= last; ++n) {
            const double t = f.time(n);
            const complex c_pos = 0.5 * (f.values[n] - std::conj(f.values[n]));
            // F(−t) = F(t)*
            const complex c_neg = 0.5 * (std::conj(f.values[n]) - f.values[n]);
            const double damp = std::exp(-eta * t) * (n == last ? 0.5 : 1.0);
            acc += damp * (std::polar(1.0, w * t) * c_pos + std::polar(1.0, -w * t) * c_neg);
        }
        s.values[j] = h * acc;
    }
    return s;
}

ResolventSpectrum born_resolvent_spectrum(const dyn::ModelSpec& model, const bath::BathSpec& bath, double eta,
                                          const std::vector<double>& omega) {
    if (!(eta > 0.0)) {
        throw std::invalid_argument("born_resolvent_spectrum: eta must be > 0");
    }
    const SuperOperator lsys = qops::liouvillian(model.hamiltonian);
    ResolventSpectrum out;
    out.steady = null_state(lsys + dyn::born_kernel_laplace(model, bath, complex(1e-12, 0.0)));
    out.cz.omega = omega;
    out.cz.eta = eta;
    out.cz.window = std::numeric_limits<double>::infinity();
    out.cz.values.resize(omega.size());

    const Operator& x = model.coupling();
    const OpVector seed = qops::vectorize(x * out.steady.rho);
    const auto n = lsys.rows();
    // F̃(z) = tr[X (z − L − S̃(z))⁻¹ X ρ_s]
    auto f_laplace = [&](complex z) {
        const SuperOperator m = z * SuperOperator::Identity(n, n) - lsys - dyn::born_kernel_laplace(model, bath, z);
        const OpVector v = m.partialPivLu().solve(seed);
        return (x * qops::devectorize(v)).trace();
    };
    for (std::size_t j = 0; j < omega.size(); ++j) {
        const complex lo = f_laplace(complex(eta, -omega[j]));
        const complex hi = f_laplace(complex(eta, omega[j]));
        // G(±ω) = ∫₀^∞ e^{±iωt − ηt} Im F dt, C(ω) = i[G(ω) − G(−ω)]
        const complex g_pos = (lo - std::conj(hi)) / complex(0.0, 2.0);
        const complex g_neg = (hi - std::conj(lo)) / complex(0.0, 2.0);
        out.cz.values[j] = complex(0.0, 1.0) * (g_pos - g_neg);
    }
    return out;
}

Response susceptibility_and_transmission(const ComplexSeries& f, double eta, const std::vector<double>& omega,
                                         double n_coupling) {
    Response r;
    r.chi = make_spectrum(f, eta, omega);
    const std::size_t last = f.size() - 1;
    for (std::size_t j = 0; j < omega.size(); ++j) {
        complex acc(0.0, 0.0);
        for (std::size_t n = 0; n <= last; ++n) {
            const double t = f.time(n);
            const complex chi_t = complex(0.0, -1.0) * (f.values[n] - std::conj(f.values[n]));
            acc += trapezoid_weight(n, last) * std::exp(-eta * t) * std::polar(1.0, omega[j] * t) * chi_t;
        }
        r.chi.values[j] = f.dt * acc;
    }
    r.transmission = r.chi;
    r.t2.resize(omega.size());
    for (std::size_t j = 0; j < omega.size(); ++j) {
        r.transmission.values[j] = 1.0 - complex(0.0, 1.0) * n_coupling * omega[j] * r.chi.values[j];
        r.t2[j] = std::norm(r.transmission.values[j]);
    }
    return r;
}

std::string_view to_string(DynamicsKind k) { return k == DynamicsKind::coherent ? "coherent" : "incoherent"; }

Classification classify_dynamics(const TimeSeries& s, double band) {
    if (s.values.empty()) {
        throw std::invalid_argument("classify_dynamics: empty series");
    }
    if (!(band > 0.0 && band < 1.0)) {
        throw std::invalid_argument("classify_dynamics: band must lie in (0, 1)");
    }
    Classification c;
    const double level = band * std::abs(s.values.front());
    int side = 0;  // last side visited outside the band: −1, +1, or 0 for none yet
    for (double v : s.values) {
        const int here = v > level ? 1 : (v < -level ? -1 : 0);
        if (here != 0) {
            if (side != 0 && here != side) {
                ++c.zero_crossings;
            }
            side = here;
        }
    }
    c.kind = c.zero_crossings >= 2 ? DynamicsKind::coherent : DynamicsKind::incoherent;
    c.decay_time = relaxation_time(s, std::exp(-1.0));
    c.settled = std::isfinite(relaxation_time(s, band));
    return c;
}

double relaxation_time(const TimeSeries& s, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("relaxation_time: threshold must lie in (0, 1)");
    }
    if (s.values.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    const double level = threshold * std::abs(s.values.front());
    std::size_t k = s.size();
    while (k > 0 && std::abs(s.values[k - 1]) < level) {
        --k;
    }
    // k is the first index of the final below-threshold stretch.
    if (k == s.size()) {
        return std::numeric_limits<double>::infinity();
    }
    return s.time(k);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = lo + step * static_cast<double>(k);
    }
    return out;
}

}  // namespace ncamaps::obs
