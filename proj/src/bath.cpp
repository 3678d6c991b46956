#include "ncamaps/bath.hpp"

#include "text.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace ncamaps::bath {

namespace {

// ∫₀¹ u e^{−iux} du, the dimensionless T = 0 correlation shape.
complex ohmic_shape(double x) {
    const complex s(0.0, -x);
    if (std::abs(x) < 1e-3) {
        // Σ_k s^k / (k! (k+2)); |s| < 1e-3 so eight terms are far below round-off.
        complex term(1.0, 0.0);
        complex sum(0.0, 0.0);
        for (int k = 0; k < 8; ++k) {
            sum += term / static_cast<double>(k + 2);
            term *= s / static_cast<double>(k + 1);
        }
        return sum;
    }
    // e^s − 1 without cancellation: cos x − 1 = −2 sin²(x/2).
    const double half = std::sin(0.5 * x);
    const complex em1(-2.0 * half * half, -std::sin(x));
    const complex es = em1 + 1.0;
    return es / s - em1 / (s * s);
}

// α ∫₀^{ω_max} ω n(ω) cos(ωτ) dω, the thermal correction to Re Γ(τ).
double thermal_part(const BathSpec& spec, double tau) {
    using boost::math::quadrature::gauss_kronrod;
    const double temp = spec.temperature;
    // ω n(ω) < 1e-16·T beyond ~40 T.
    const double upper = std::min(spec.omega_c, 40.0 * temp);
    auto integrand = [&](double w) {
        if (w == 0.0) {
            return temp;
        }
        return w / std::expm1(w / temp) * std::cos(w * tau);
    };
    const double width = std::abs(tau) > 0.0 ? std::numbers::pi / std::abs(tau) : upper;
    const auto chunks = static_cast<std::size_t>(std::ceil(upper / width));
    const double step = upper / static_cast<double>(std::max<std::size_t>(chunks, 1));

    double sum = 0.0;
    double error = 0.0;
    for (std::size_t k = 0; k < std::max<std::size_t>(chunks, 1); ++k) {
        double chunk_error = 0.0;
        const double a = step * static_cast<double>(k);
        sum += gauss_kronrod<double, 21>::integrate(integrand, a, a + step, 8, 1e-13, &chunk_error);
        error += chunk_error;
    }
    const double scale = std::max(temp * upper, 1e-300);
    if (error > 1e-9 * scale) {
        throw QuadratureError("thermal correlation quadrature did not converge at tau=" +
                                  std::to_string(tau) + " (error estimate " + std::to_string(error) + ")",
                              error);
    }
    return spec.alpha * sum;
}

}  // namespace

void BathSpec::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("bath.alpha must be finite and >= 0");
    }
    if (!(omega_c > 0.0) || !std::isfinite(omega_c)) {
        throw std::invalid_argument("bath.omega_c must be finite and > 0");
    }
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw std::invalid_argument("bath.temperature must be finite and >= 0");
    }
}

double spectral_density(const BathSpec& spec, double omega) {
    if (omega <= 0.0 || omega >= spec.omega_c) {
        return 0.0;
    }
    return 2.0 * std::numbers::pi * spec.alpha * omega;
}

complex correlation(const BathSpec& spec, double tau) {
    if (tau < 0.0) {
        return std::conj(correlation(spec, -tau));
    }
    if (spec.alpha == 0.0) {
        return {0.0, 0.0};
    }
    // (1/4π) ∫₀^{ω_c} J(ω) e^{−iωτ} dω = (α/2) ω_c² ∫₀¹ u e^{−iu ω_c τ} du
    const double wc = spec.omega_c;
    complex value = 0.5 * spec.alpha * wc * wc * ohmic_shape(wc * tau);
    if (spec.temperature > 0.0) {
        value += thermal_part(spec, tau);
    }
    return value;
}

complex laplace_correlation(const BathSpec& spec, complex z) {
    spec.validate();
    if (spec.temperature > 0.0) {
        throw std::invalid_argument("laplace_correlation: only the zero-temperature bath has a closed form");
    }
    if (!(z.real() > 0.0)) {
        throw std::invalid_argument("laplace_correlation: Re z must be > 0");
    }
    // (α/2) ω_c ∫₀¹ u / (z/ω_c + iu) du = −i (α/2) ω_c ∫₀¹ u / (u − a) du,  a = iz/ω_c.
    // Im a > 0, so u − a never meets the branch cut and the logs can be split.
    const double wc = spec.omega_c;
    const complex a = complex(0.0, 1.0) * z / wc;
    const complex inner = 1.0 + a * (std::log(1.0 - a) - std::log(-a));
    return complex(0.0, -0.5 * spec.alpha * wc) * inner;
}

CorrelationTable tabulate(const BathSpec& spec, double dt, std::size_t n_steps) {
    spec.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("tabulate: dt must be finite and > 0");
    }
    CorrelationTable table;
    table.spec = spec;
    table.dt = dt;
    table.values.resize(n_steps + 1);
    for (std::size_t n = 0; n <= n_steps; ++n) {
        table.values[n] = correlation(spec, static_cast<double>(n) * dt);
    }
    return table;
}

std::optional<double> correlation_time(const CorrelationTable& table, double fraction) {
    if (table.values.empty()) {
        return std::nullopt;
    }
    const double g0 = std::abs(table.values.front());
    if (g0 == 0.0) {
        return std::nullopt;
    }
    for (std::size_t n = 0; n < table.size(); ++n) {
        if (std::abs(table.values[n]) < fraction * g0) {
            return static_cast<double>(n) * table.dt;
        }
    }
    return std::nullopt;
}

void write_correlation_csv(const CorrelationTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << "# alpha=" << text::number(table.spec.alpha) << '\n'
        << "# omega_c=" << text::number(table.spec.omega_c) << '\n'
        << "# temperature=" << text::number(table.spec.temperature) << '\n'
        << "# dt=" << text::number(table.dt) << '\n'
        << "tau,re_gamma,im_gamma\n";
    for (std::size_t n = 0; n < table.size(); ++n) {
        out << text::number(static_cast<double>(n) * table.dt) << ',' << text::number(table.values[n].real())
            << ',' << text::number(table.values[n].imag()) << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

CorrelationTable read_correlation_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    CorrelationTable table;
    bool have_dt = false;
    bool have_columns = false;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& why) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = text::trim(line);
        if (view.empty()) {
            continue;
        }
        if (view.front() == '#') {
            const auto body = text::trim(view.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) {
                continue;
            }
            const auto key = text::trim(body.substr(0, eq));
            const auto value = text::parse_double(body.substr(eq + 1));
            if (!value) {
                fail("bad header value for " + std::string(key));
            }
            if (key == "alpha") {
                table.spec.alpha = *value;
            } else if (key == "omega_c") {
                table.spec.omega_c = *value;
            } else if (key == "temperature") {
                table.spec.temperature = *value;
            } else if (key == "dt") {
                table.dt = *value;
                have_dt = true;
            }
            continue;
        }
        if (!have_columns) {
            if (view != "tau,re_gamma,im_gamma") {
                fail("expected column header tau,re_gamma,im_gamma");
            }
            have_columns = true;
            continue;
        }
        const auto fields = text::split(view, ',');
        if (fields.size() != 3) {
            fail("expected 3 columns");
        }
        const auto re = text::parse_double(fields[1]);
        const auto im = text::parse_double(fields[2]);
        if (!re || !im) {
            fail("non-numeric entry");
        }
        table.values.emplace_back(*re, *im);
    }
    if (!have_dt || !have_columns) {
        throw std::runtime_error(path.string() + ": missing dt header or column line");
    }
    table.spec.validate();
    return table;
}

}  // namespace ncamaps::bath
