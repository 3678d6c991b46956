// qops.hpp — operator and superoperator algebra on a finite Hilbert space
//
// Vectorization is column-stacking: entry (i,j) of a D×D operator sits at
// index j·D + i. With this convention
//
//     vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ),
//
// so left_mult(X) = I ⊗ X and right_mult(X) = Xᵀ ⊗ I.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncamaps {

using complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;       // D×D
using SuperOperator = Eigen::MatrixXcd;  // D²×D², acts on column-stacked vectors
using OpVector = Eigen::VectorXcd;       // length D²

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace qops {

inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kAlgebraicTol = 1e-10;

// --------------------------- named operators -------------------------------

Operator identity(std::size_t dim);
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();
// Basis order (↑, ↓): σz|↑⟩ = |↑⟩, σz|↓⟩ = −|↓⟩.
Operator projector_up();
Operator projector_down();

// ----------------------------- vectorization -------------------------------

OpVector vectorize(const Operator& a);
Operator devectorize(const OpVector& v);

// Dimension D of the operator space a D²×D² superoperator acts on.
std::size_t operator_dim(const SuperOperator& s);

SuperOperator identity_super(std::size_t dim);
SuperOperator left_mult(const Operator& x);   // ρ ↦ X ρ
SuperOperator right_mult(const Operator& x);  // ρ ↦ ρ X

Operator apply(const SuperOperator& s, const Operator& rho);

// Generator of ρ ↦ −i[H, ρ]. Throws std::invalid_argument unless H is Hermitian
// within kAlgebraicTol.
SuperOperator liouvillian(const Operator& h);

// exp(L·t). Hermitian and anti-Hermitian generators go through a unitary
// eigendecomposition; everything else through scaling-and-squaring Padé.
// Throws std::overflow_error if the result is not finite.
SuperOperator superop_exp(const SuperOperator& l, double t);

// exp(L·t) for many t from a single eigendecomposition. L must be Hermitian
// or anti-Hermitian (the Liouvillian of a Hermitian H always is).
class NormalExponential {
public:
    explicit NormalExponential(const SuperOperator& l);
    SuperOperator at(double t) const;

private:
    Eigen::MatrixXcd vectors_;
    Eigen::VectorXcd values_;
};

// ------------------------------ diagnostics --------------------------------

double hermiticity_defect(const Eigen::MatrixXcd& a);  // max |A − A†|
bool is_hermitian(const Eigen::MatrixXcd& a, double tol = kAlgebraicTol);

// Map form: w†V = w† with w = vec(I). Returns max |w†V − w†|.
double trace_defect_map(const SuperOperator& v);
// Generator form: w†L = 0. Returns max |w†L|.
double trace_defect_generator(const SuperOperator& l);

struct DensityDiagnostics {
    double trace = 0.0;
    double hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;
    double purity = 0.0;
};

DensityDiagnostics density_diagnostics(const Operator& rho);

double expectation(const Operator& op, const Operator& rho);  // Re tr[O ρ]

}  // namespace qops
}  // namespace ncamaps
