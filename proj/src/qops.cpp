#include "ncamaps/qops.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace ncamaps::qops {

namespace {

void require_square(const Eigen::MatrixXcd& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

bool is_anti_hermitian(const Eigen::MatrixXcd& a, double tol) {
    return (a + a.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

}  // namespace

Operator identity(std::size_t dim) {
    return Operator::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

Operator sigma_x() {
    Operator m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

Operator sigma_y() {
    Operator m(2, 2);
    m << 0.0, complex(0.0, -1.0),
         complex(0.0, 1.0), 0.0;
    return m;
}

Operator sigma_z() {
    Operator m(2, 2);
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}

Operator projector_up() {
    Operator m = Operator::Zero(2, 2);
    m(0, 0) = 1.0;
    return m;
}

Operator projector_down() {
    Operator m = Operator::Zero(2, 2);
    m(1, 1) = 1.0;
    return m;
}

OpVector vectorize(const Operator& a) {
    require_square(a, "vectorize");
    // Eigen storage is column-major, so the raw buffer is already column-stacked.
    return Eigen::Map<const OpVector>(a.data(), a.size());
}

Operator devectorize(const OpVector& v) {
    const auto n = v.size();
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (d * d != n || n == 0) {
        throw DimensionError("devectorize: length " + std::to_string(n) + " is not a perfect square");
    }
    return Eigen::Map<const Operator>(v.data(), d, d);
}

std::size_t operator_dim(const SuperOperator& s) {
    require_square(s, "superoperator");
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
    if (d * d != s.rows()) {
        throw DimensionError("superoperator: size " + std::to_string(s.rows()) + " is not D²");
    }
    return static_cast<std::size_t>(d);
}

SuperOperator identity_super(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim * dim);
    return SuperOperator::Identity(n, n);
}

SuperOperator left_mult(const Operator& x) {
    require_square(x, "left_mult");
    return Eigen::kroneckerProduct(Operator::Identity(x.rows(), x.cols()), x);
}

SuperOperator right_mult(const Operator& x) {
    require_square(x, "right_mult");
    return Eigen::kroneckerProduct(x.transpose(), Operator::Identity(x.rows(), x.cols()));
}

Operator apply(const SuperOperator& s, const Operator& rho) {
    require_square(rho, "apply");
    if (s.rows() != rho.size()) {
        throw DimensionError("apply: superoperator of size " + std::to_string(s.rows()) +
                             " cannot act on a " + std::to_string(rho.rows()) + "x" +
                             std::to_string(rho.cols()) + " operator");
    }
    return devectorize(s * vectorize(rho));
}

SuperOperator liouvillian(const Operator& h) {
    require_square(h, "liouvillian");
    if (!is_hermitian(h, kAlgebraicTol)) {
        throw std::invalid_argument("liouvillian: Hamiltonian is not Hermitian (defect " +
                                    std::to_string(hermiticity_defect(h)) + ")");
    }
    return complex(0.0, -1.0) * (left_mult(h) - right_mult(h));
}

NormalExponential::NormalExponential(const SuperOperator& l) {
    require_square(l, "NormalExponential");
    if (is_hermitian(l, kAlgebraicTol)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(l);
        vectors_ = es.eigenvectors();
        values_ = es.eigenvalues().cast<complex>();
    } else if (is_anti_hermitian(l, kAlgebraicTol)) {
        // i·L is Hermitian with eigenvalues μ, so L has eigenvalues −iμ.
        const Eigen::MatrixXcd il = complex(0.0, 1.0) * l;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (il + il.adjoint()));
        vectors_ = es.eigenvectors();
        values_ = complex(0.0, -1.0) * es.eigenvalues().cast<complex>();
    } else {
        throw std::invalid_argument("NormalExponential: generator is neither Hermitian nor anti-Hermitian");
    }
}

SuperOperator NormalExponential::at(double t) const {
    const Eigen::VectorXcd phases = (values_ * t).array().exp();
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

SuperOperator superop_exp(const SuperOperator& l, double t) {
    require_square(l, "superop_exp");
    if (!l.allFinite() || !std::isfinite(t)) {
        throw std::invalid_argument("superop_exp: non-finite input");
    }
    if (t == 0.0) {
        return SuperOperator::Identity(l.rows(), l.cols());
    }
    SuperOperator result;
    if (is_hermitian(l, kAlgebraicTol) || is_anti_hermitian(l, kAlgebraicTol)) {
        result = NormalExponential(l).at(t);
    } else {
        const SuperOperator scaled = l * t;
        result = scaled.exp();
    }
    if (!result.allFinite()) {
        throw std::overflow_error("superop_exp: result overflowed");
    }
    return result;
}

double hermiticity_defect(const Eigen::MatrixXcd& a) {
    require_square(a, "hermiticity_defect");
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Eigen::MatrixXcd& a, double tol) {
    return hermiticity_defect(a) <= tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

double trace_defect_map(const SuperOperator& v) {
    const auto d = operator_dim(v);
    const OpVector w = vectorize(identity(d));
    return (w.adjoint() * v - w.adjoint()).cwiseAbs().maxCoeff();
}

double trace_defect_generator(const SuperOperator& l) {
    const auto d = operator_dim(l);
    const OpVector w = vectorize(identity(d));
    return (w.adjoint() * l).cwiseAbs().maxCoeff();
}

DensityDiagnostics density_diagnostics(const Operator& rho) {
    require_square(rho, "density_diagnostics");
    DensityDiagnostics out;
    out.trace = rho.trace().real();
    out.hermiticity_defect = hermiticity_defect(rho);
    const Operator herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> es(herm, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    out.purity = (rho * rho).trace().real();
    return out;
}

double expectation(const Operator& op, const Operator& rho) {
    if (op.rows() != rho.rows() || op.cols() != rho.cols()) {
        throw DimensionError("expectation: operator and state dimensions differ");
    }
    return (op * rho).trace().real();
}

}  // namespace ncamaps::qops
