#pragma once

// Single-structure objects on R^{2n}: metrics, symplectic forms, complex
// structures and the admissible triples they form, plus the linear fields and
// quadratic functions built from them.
//
// Matrix conventions used throughout the library:
//   g(x, y)     = x^T g y
//   omega(x, y) = x^T omega y
//   J           = g^-1 omega          (so omega = g J)
//   field X_A   = A x                 (the Liouville field has A = I)
// With these conventions the Hamiltonian field of x -> 1/2 x^T F x is
// M_F = -omega^-1 F, which returns J for F = g.

#include <utility>

#include "biham/linalg.hpp"
#include "biham/report.hpp"

namespace biham {

class MetricTensor {
public:
    /// Validates symmetry (residuals below rel are symmetrized away) and
    /// positive-definiteness. Throws InvalidInput otherwise.
    static MetricTensor from(const RealMatrix& m, const Tolerance& tol = {});

    const RealMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    explicit MetricTensor(RealMatrix m) : m_(std::move(m)) {}
    RealMatrix m_;
};

class SymplecticForm {
public:
    /// Validates antisymmetry, even dimension and nondegeneracy.
    static SymplecticForm from(const RealMatrix& m, const Tolerance& tol = {});

    const RealMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    explicit SymplecticForm(RealMatrix m) : m_(std::move(m)) {}
    RealMatrix m_;
};

class ComplexStructure {
public:
    /// Validates J^2 = -I.
    static ComplexStructure from(const RealMatrix& m, const Tolerance& tol = {});

    const RealMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    explicit ComplexStructure(RealMatrix m) : m_(std::move(m)) {}
    RealMatrix m_;
};

/// (g, omega, J) with J = g^-1 omega and J^2 = -I. Only constructible through
/// check_admissible / polar_admissible / admissible_form_for.
class AdmissibleTriple {
public:
    const MetricTensor& g() const { return g_; }
    const SymplecticForm& omega() const { return omega_; }
    const ComplexStructure& j() const { return j_; }
    Eigen::Index dim() const { return g_.dim(); }

private:
    friend Checked<AdmissibleTriple> check_admissible(const MetricTensor&, const SymplecticForm&,
                                                      const Tolerance&);
    AdmissibleTriple(MetricTensor g, SymplecticForm omega, ComplexStructure j)
        : g_(std::move(g)), omega_(std::move(omega)), j_(std::move(j)) {}

    MetricTensor g_;
    SymplecticForm omega_;
    ComplexStructure j_;
};

/// Linear vector field x -> A x. Also the carrier for the (1,1)-tensor T_A.
struct LinearField {
    RealMatrix a;

    static LinearField liouville(Eigen::Index dim) {
        return {RealMatrix::Identity(dim, dim)};
    }
};

/// x -> 1/2 x^T f x.
class QuadraticForm {
public:
    static QuadraticForm from(const RealMatrix& f, const Tolerance& tol = {});

    const RealMatrix& matrix() const { return f_; }
    double value(const RealVector& x) const { return 0.5 * x.dot(f_ * x); }

private:
    explicit QuadraticForm(RealMatrix f) : f_(std::move(f)) {}
    RealMatrix f_;
};

/// Residual report for every admissible-triple relation. Used both to build
/// a triple and to audit one.
CheckReport admissibility_residuals(const RealMatrix& g, const RealMatrix& omega,
                                    const RealMatrix& j, const Tolerance& tol = {});

/// Builds J = g^-1 omega and verifies J^2 = -I together with the derived
/// relations (J^T g J = g, gJ + J^T g = 0, J^T omega J = omega).
/// Throws InvalidInput for mismatched or odd dimensions.
Checked<AdmissibleTriple> check_admissible(const MetricTensor& g, const SymplecticForm& omega,
                                           const Tolerance& tol = {});

/// 1/2 (J^T g J + g).
MetricTensor symmetrize_metric(const RealMatrix& g, const ComplexStructure& j,
                               const Tolerance& tol = {});

/// Polar construction for an arbitrary pair (g, omega): with A = g^-1 omega
/// and P = (-A^2)^{1/2} taken g-self-adjointly, returns (g P, omega, A P^-1).
AdmissibleTriple polar_admissible(const MetricTensor& g, const SymplecticForm& omega,
                                  const Tolerance& tol = {});

/// Same polar factor J = A P^-1, but keeps the metric and replaces the
/// symplectic form with g J. In 2D this is the unique admissible form for g
/// with the orientation of `orientation`.
AdmissibleTriple admissible_form_for(const MetricTensor& g, const SymplecticForm& orientation,
                                     const Tolerance& tol = {});

/// Real and imaginary parts of h(x, y): (g(x, y), omega(x, y)).
std::pair<double, double> hermitian_value(const AdmissibleTriple& t, const RealVector& x,
                                          const RealVector& y);

/// The quadratic function 1/2 g(x, x) of a triple.
QuadraticForm energy(const AdmissibleTriple& t);

/// Hamiltonian field of a quadratic function: M_F = -omega^-1 F.
LinearField hamiltonian_field(const QuadraticForm& f, const SymplecticForm& omega);

/// The phase field Gamma = J(Delta), i.e. the field with matrix J. Throws
/// NumericalError if it disagrees with hamiltonian_field(energy(t)).
LinearField gamma_field(const AdmissibleTriple& t, const Tolerance& tol = {});

struct PreservationResult {
    bool preserves = false;
    double omega_residual = 0.0;  // ||omega A - (omega A)^T||
    double g_residual = 0.0;      // ||g A + (g A)^T||
    double omega_limit = 0.0;
    double g_limit = 0.0;
};

/// Whether the field preserves both g and omega of the triple.
PreservationResult field_preserves(const LinearField& field, const AdmissibleTriple& t,
                                   const Tolerance& tol = {});
PreservationResult field_preserves(const LinearField& field, const RealMatrix& g,
                                   const RealMatrix& omega, const Tolerance& tol = {});

/// cos(t) I + sin(t) J.
RealMatrix phase_group(const AdmissibleTriple& t, double time);

/// [X_A, X_B] = -X_[A,B].
LinearField lie_bracket_fields(const LinearField& x, const LinearField& y);

/// {f, h} = omega(X_h, X_f) as a quadratic form.
QuadraticForm poisson_bracket(const QuadraticForm& f, const QuadraticForm& h,
                              const SymplecticForm& omega);

}  // namespace biham
