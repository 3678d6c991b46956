#include <doctest.h>

#include "ncamaps/qops.hpp"

#include <random>

using namespace ncamaps;

namespace {

Eigen::MatrixXcd random_matrix(Eigen::Index n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = complex(g(rng), g(rng));
        }
    }
    return m;
}

Eigen::MatrixXcd random_hermitian(Eigen::Index n, std::mt19937& rng) {
    const auto a = random_matrix(n, rng);
    return 0.5 * (a + a.adjoint());
}

// Independent reference: Taylor series with enough terms for ‖A‖ ≲ 3.
Eigen::MatrixXcd taylor_exp(const Eigen::MatrixXcd& a) {
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    Eigen::MatrixXcd term = sum;
    for (int k = 1; k < 80; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

}  // namespace

TEST_SUITE("qops") {

TEST_CASE("pauli algebra") {
    const complex i(0, 1);
    const auto x = qops::sigma_x(), y = qops::sigma_y(), z = qops::sigma_z();
    CHECK((x * y - i * z).norm() < 1e-15);
    CHECK((y * z - i * x).norm() < 1e-15);
    CHECK((x * x - qops::identity(2)).norm() < 1e-15);
    CHECK((qops::projector_up() + qops::projector_down() - qops::identity(2)).norm() < 1e-15);
    CHECK(qops::expectation(z, qops::projector_down()) == doctest::Approx(-1.0));
}

TEST_CASE("column-stacking convention: vec(A rho B) = (B^T kron A) vec(rho)") {
    std::mt19937 rng(7);
    for (Eigen::Index d : {2, 3, 4}) {
        const auto a = random_matrix(d, rng), b = random_matrix(d, rng), rho = random_matrix(d, rng);
        const OpVector v = qops::vectorize(rho);
        CHECK(v(1) == rho(1, 0));  // entry (i, j) sits at j·D + i
        const OpVector lhs = qops::vectorize(a * rho * b);
        const OpVector rhs = qops::left_mult(a) * qops::right_mult(b) * v;
        CHECK((lhs - rhs).norm() < 1e-12 * lhs.norm());
        CHECK((qops::devectorize(v) - rho).norm() == 0.0);
        CHECK(qops::operator_dim(qops::left_mult(a)) == static_cast<std::size_t>(d));
    }
}

TEST_CASE("dimension errors") {
    CHECK_THROWS_AS(qops::devectorize(OpVector::Zero(3)), DimensionError);
    CHECK_THROWS_AS(qops::operator_dim(Eigen::MatrixXcd::Zero(3, 3)), DimensionError);
    CHECK_THROWS_AS(qops::apply(qops::identity_super(2), qops::identity(3)), DimensionError);
    CHECK_THROWS_AS(qops::expectation(qops::identity(3), qops::identity(2)), DimensionError);
}

TEST_CASE("liouvillian acts as -i[H, .] and is trace-preserving") {
    std::mt19937 rng(11);
    const auto h = random_hermitian(3, rng);
    const auto rho = random_matrix(3, rng);
    const auto l = qops::liouvillian(h);
    const Operator direct = complex(0, -1) * (h * rho - rho * h);
    CHECK((qops::apply(l, rho) - direct).norm() < 1e-12);
    CHECK(qops::trace_defect_generator(l) < 1e-13);

    Operator not_hermitian = h;
    not_hermitian(0, 1) += 0.5;
    CHECK_THROWS_AS(qops::liouvillian(not_hermitian), std::invalid_argument);
}

TEST_CASE("superop_exp matches a Taylor-series reference for normal and non-normal generators") {
    std::mt19937 rng(3);
    const auto h = random_hermitian(2, rng);
    const auto l = qops::liouvillian(h);
    const double t = 0.7;
    CHECK((qops::superop_exp(l, t) - taylor_exp(l * t)).norm() < 1e-12);

    const Eigen::MatrixXcd generic = random_matrix(4, rng) * 0.4;
    CHECK((qops::superop_exp(generic, 1.3) - taylor_exp(generic * 1.3)).norm() < 1e-11);

    qops::NormalExponential ne(l);
    for (double s : {0.0, 0.5, 3.0, -2.0}) {
        CHECK((ne.at(s) - taylor_exp(l * s)).norm() < 1e-11);
    }
}

TEST_CASE("closed-form unitary: exp(-i sigma_x t/2) conjugation") {
    const double t = 1.9;
    const auto l = qops::liouvillian(0.5 * qops::sigma_x());
    const Operator u = std::cos(t / 2) * qops::identity(2) - complex(0, 1) * std::sin(t / 2) * qops::sigma_x();
    const Operator rho = qops::projector_down();
    const Operator expect = u * rho * u.adjoint();
    CHECK((qops::apply(qops::superop_exp(l, t), rho) - expect).norm() < 1e-14);
    // <σz>(t) = −cos t for ρ(0) = |↓⟩⟨↓|
    CHECK(qops::expectation(qops::sigma_z(), expect) == doctest::Approx(-std::cos(t)).epsilon(1e-14));
}

TEST_CASE("superop_exp reports overflow and rejects non-finite input") {
    SuperOperator big = SuperOperator::Identity(4, 4) * 1e3;
    CHECK_THROWS_AS(qops::superop_exp(big, 10.0), std::overflow_error);
    SuperOperator nan = SuperOperator::Zero(4, 4);
    nan(0, 0) = std::nan("");
    CHECK_THROWS_AS(qops::superop_exp(nan, 1.0), std::invalid_argument);
}

TEST_CASE("diagnostics") {
    Operator rho(2, 2);
    rho << 0.75, complex(0.1, 0.2), complex(0.1, -0.2), 0.25;
    const auto d = qops::density_diagnostics(rho);
    CHECK(d.trace == doctest::Approx(1.0));
    CHECK(d.hermiticity_defect < 1e-15);
    // Eigenvalues of [[a, b],[b*, c]]: (a+c)/2 ± sqrt(((a−c)/2)² + |b|²)
    const double lo = 0.5 - std::sqrt(0.0625 + 0.05);
    CHECK(d.min_eigenvalue == doctest::Approx(lo).epsilon(1e-12));
    CHECK(d.purity == doctest::Approx(0.75 * 0.75 + 0.25 * 0.25 + 2 * 0.05).epsilon(1e-12));

    CHECK(qops::trace_defect_map(qops::identity_super(2)) == 0.0);
    SuperOperator leaky = qops::identity_super(2) * 0.9;
    CHECK(qops::trace_defect_map(leaky) == doctest::Approx(0.1));
    CHECK_FALSE(qops::is_hermitian(qops::sigma_y() * complex(0, 1)));
}

}  // TEST_SUITE
