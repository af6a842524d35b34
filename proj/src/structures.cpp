#include "biham/structures.hpp"

#include <cmath>
#include <sstream>

#include "biham/error.hpp"

namespace biham {

namespace {

std::string residual_message(const char* what, const char* relation, double residual,
                             double limit) {
    std::ostringstream os;
    os << what << ": " << relation << " (residual " << residual << ", limit " << limit << ")";
    return os.str();
}

void require_even(Eigen::Index dim, const char* what) {
    if (dim % 2 != 0) throw InvalidInput(std::string(what) + ": dimension must be even");
}

RealMatrix solve_spd(const RealMatrix& g, const RealMatrix& rhs, const char* what) {
    Eigen::LLT<RealMatrix> llt(g);
    if (llt.info() != Eigen::Success)
        throw InvalidInput(std::string(what) + ": metric is not positive-definite");
    return llt.solve(rhs);
}

RealMatrix solve_general(const RealMatrix& a, const RealMatrix& rhs) {
    return Eigen::PartialPivLU<RealMatrix>(a).solve(rhs);
}

}  // namespace

MetricTensor MetricTensor::from(const RealMatrix& m, const Tolerance& tol) {
    require_square(m, "metric");
    require_finite(m, "metric");
    const double scale = scale_of(m);
    const double asym = inf_norm(RealMatrix(m - m.transpose()));
    if (asym > tol.rel * scale)
        throw InvalidInput(residual_message("metric", "not symmetric", asym, tol.rel * scale));
    RealMatrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (!(lo > tol.rel * scale)) {
        std::ostringstream os;
        os << "metric: not positive-definite (smallest eigenvalue " << lo << ")";
        throw InvalidInput(os.str());
    }
    return MetricTensor(std::move(sym));
}

SymplecticForm SymplecticForm::from(const RealMatrix& m, const Tolerance& tol) {
    require_square(m, "symplectic form");
    require_finite(m, "symplectic form");
    require_even(m.rows(), "symplectic form");
    const double scale = scale_of(m);
    const double sym = inf_norm(RealMatrix(m + m.transpose()));
    if (sym > tol.rel * scale)
        throw InvalidInput(
            residual_message("symplectic form", "not antisymmetric", sym, tol.rel * scale));
    RealMatrix anti = 0.5 * (m - m.transpose());
    Eigen::BDCSVD<RealMatrix> svd(anti);
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > tol.rel * scale)) {
        std::ostringstream os;
        os << "symplectic form: degenerate (smallest singular value " << smin << ")";
        throw InvalidInput(os.str());
    }
    return SymplecticForm(std::move(anti));
}

ComplexStructure ComplexStructure::from(const RealMatrix& m, const Tolerance& tol) {
    require_square(m, "complex structure");
    require_finite(m, "complex structure");
    require_even(m.rows(), "complex structure");
    const auto n = m.rows();
    const double res = inf_norm(RealMatrix(m * m + RealMatrix::Identity(n, n)));
    const double s = scale_of(m);
    const double limit = tol.rel * static_cast<double>(n) * s * s;
    if (res > limit)
        throw InvalidInput(residual_message("complex structure", "J^2 != -I", res, limit));
    return ComplexStructure(m);
}

QuadraticForm QuadraticForm::from(const RealMatrix& f, const Tolerance& tol) {
    require_square(f, "quadratic form");
    require_finite(f, "quadratic form");
    const double scale = scale_of(f);
    const double asym = inf_norm(RealMatrix(f - f.transpose()));
    if (asym > tol.rel * scale)
        throw InvalidInput(
            residual_message("quadratic form", "not symmetric", asym, tol.rel * scale));
    return QuadraticForm(0.5 * (f + f.transpose()));
}

CheckReport admissibility_residuals(const RealMatrix& g, const RealMatrix& omega,
                                    const RealMatrix& j, const Tolerance& tol) {
    const auto n = g.rows();
    const RealMatrix id = RealMatrix::Identity(n, n);
    const double sg = scale_of(g), sw = scale_of(omega), sj = scale_of(j);
    CheckReport r;
    r.add("J^2 = -I", inf_norm(RealMatrix(j * j + id)),
          tol.rel * static_cast<double>(n) * sj * sj);
    r.add("J = g^-1 omega", inf_norm(RealMatrix(g * j - omega)), tol.rel * sg * sj);
    r.add("J^T g J = g", inf_norm(RealMatrix(j.transpose() * g * j - g)), tol.rel * sg * sj * sj);
    r.add("g J + J^T g = 0", inf_norm(RealMatrix(g * j + j.transpose() * g)), tol.rel * sg * sj);
    r.add("J^T omega J = omega", inf_norm(RealMatrix(j.transpose() * omega * j - omega)),
          tol.rel * sw * sj * sj);
    return r;
}

Checked<AdmissibleTriple> check_admissible(const MetricTensor& g, const SymplecticForm& omega,
                                           const Tolerance& tol) {
    if (g.dim() != omega.dim()) throw InvalidInput("check_admissible: dimension mismatch");
    require_even(g.dim(), "check_admissible");

    const RealMatrix j = solve_spd(g.matrix(), omega.matrix(), "check_admissible");
    Checked<AdmissibleTriple> out;
    out.report = admissibility_residuals(g.matrix(), omega.matrix(), j, tol);
    if (out.report.ok())
        out.value = AdmissibleTriple(g, omega, ComplexStructure::from(j, tol));
    return out;
}

MetricTensor symmetrize_metric(const RealMatrix& g, const ComplexStructure& j,
                               const Tolerance& tol) {
    require_same_dim(g, j.matrix(), "symmetrize_metric");
    const RealMatrix& jm = j.matrix();
    const RealMatrix gs = 0.5 * (jm.transpose() * g * jm + g);
    try {
        return MetricTensor::from(gs, tol);
    } catch (const InvalidInput& e) {
        throw NumericalError(std::string("symmetrize_metric: ") + e.what());
    }
}

namespace {

// Polar factor of A = g^-1 omega in whitened coordinates. Returns (J, P)
// in the original coordinates.
std::pair<RealMatrix, RealMatrix> polar_factor(const MetricTensor& g,
                                               const SymplecticForm& omega,
                                               const Tolerance& tol) {
    if (g.dim() != omega.dim()) throw InvalidInput("polar_admissible: dimension mismatch");
    Eigen::LLT<RealMatrix> llt(g.matrix());
    if (llt.info() != Eigen::Success)
        throw InvalidInput("polar_admissible: metric is not positive-definite");

    // Whitened A: L^T A L^-T = L^-1 omega L^-T, skew-symmetric iff A is g-skew.
    RealMatrix aw = llt.matrixL().solve(omega.matrix());
    aw = llt.matrixL().solve(RealMatrix(aw.transpose())).transpose();
    const double skew = inf_norm(RealMatrix(aw + aw.transpose()));
    const double limit = tol.rel * scale_of(aw);
    if (skew > limit)
        throw InvalidInput(residual_message("polar_admissible", "A is not g-skew-adjoint", skew,
                                            limit));
    aw = 0.5 * (aw - aw.transpose());

    const RealMatrix minus_a2 = aw.transpose() * aw;
    const RealMatrix pw = sym_sqrt(minus_a2, tol);
    Eigen::LDLT<RealMatrix> pfac(pw);
    const double pmin = pfac.vectorD().cwiseAbs().minCoeff();
    if (pfac.info() != Eigen::Success || !(pmin > tol.rel * scale_of(pw)))
        throw NumericalError("polar_admissible: P is singular");

    // J_w = A_w P_w^-1 = (P_w^-1 A_w^T)^T
    const RealMatrix jw = pfac.solve(RealMatrix(aw.transpose())).transpose();

    const RealMatrix lt = llt.matrixU();
    const RealMatrix j = llt.matrixU().solve(RealMatrix(jw * lt));  // L^-T J_w L^T
    const RealMatrix p = llt.matrixU().solve(RealMatrix(pw * lt));  // L^-T P_w L^T
    return {j, p};
}

}  // namespace

AdmissibleTriple polar_admissible(const MetricTensor& g, const SymplecticForm& omega,
                                  const Tolerance& tol) {
    const auto [j, p] = polar_factor(g, omega, tol);
    const RealMatrix g_omega = g.matrix() * p;
    const double asym = inf_norm(RealMatrix(g_omega - g_omega.transpose()));
    if (asym > tol.rel * scale_of(g_omega))
        throw NumericalError("polar_admissible: g P is not symmetric");
    auto checked = check_admissible(MetricTensor::from(g_omega, tol), omega, tol);
    if (!checked)
        throw NumericalError("polar_admissible: constructed triple failed admissibility (" +
                             checked.report.failures().front() + ")");
    return std::move(*checked.value);
}

AdmissibleTriple admissible_form_for(const MetricTensor& g, const SymplecticForm& orientation,
                                     const Tolerance& tol) {
    const auto [j, p] = polar_factor(g, orientation, tol);
    const RealMatrix w = g.matrix() * j;
    auto checked = check_admissible(g, SymplecticForm::from(0.5 * (w - w.transpose()), tol), tol);
    if (!checked)
        throw NumericalError("admissible_form_for: constructed triple failed admissibility (" +
                             checked.report.failures().front() + ")");
    return std::move(*checked.value);
}

std::pair<double, double> hermitian_value(const AdmissibleTriple& t, const RealVector& x,
                                          const RealVector& y) {
    if (x.size() != t.dim() || y.size() != t.dim())
        throw InvalidInput("hermitian_value: dimension mismatch");
    return {x.dot(t.g().matrix() * y), x.dot(t.omega().matrix() * y)};
}

QuadraticForm energy(const AdmissibleTriple& t) { return QuadraticForm::from(t.g().matrix()); }

LinearField hamiltonian_field(const QuadraticForm& f, const SymplecticForm& omega) {
    if (f.matrix().rows() != omega.dim())
        throw InvalidInput("hamiltonian_field: dimension mismatch");
    return {-solve_general(omega.matrix(), f.matrix())};
}

LinearField gamma_field(const AdmissibleTriple& t, const Tolerance& tol) {
    const RealMatrix& j = t.j().matrix();
    const LinearField via_energy = hamiltonian_field(energy(t), t.omega());
    const double res = inf_norm(RealMatrix(via_energy.a - j));
    const double limit = tol.rel * scale_of(j) * scale_of(via_energy.a);
    if (res > limit)
        throw NumericalError(residual_message("gamma_field", "-omega^-1 g differs from J", res,
                                              limit));
    return {j};
}

PreservationResult field_preserves(const LinearField& field, const RealMatrix& g,
                                   const RealMatrix& omega, const Tolerance& tol) {
    require_same_dim(field.a, g, "field_preserves");
    require_same_dim(field.a, omega, "field_preserves");
    const RealMatrix& a = field.a;
    const RealMatrix wa = omega * a;
    const RealMatrix ga = g * a;
    PreservationResult r;
    r.omega_residual = inf_norm(RealMatrix(wa - wa.transpose()));
    r.g_residual = inf_norm(RealMatrix(ga + ga.transpose()));
    r.omega_limit = tol.rel * scale_of(omega) * scale_of(a);
    r.g_limit = tol.rel * scale_of(g) * scale_of(a);
    r.preserves = r.omega_residual <= r.omega_limit && r.g_residual <= r.g_limit;
    return r;
}

PreservationResult field_preserves(const LinearField& field, const AdmissibleTriple& t,
                                   const Tolerance& tol) {
    return field_preserves(field, t.g().matrix(), t.omega().matrix(), tol);
}

RealMatrix phase_group(const AdmissibleTriple& t, double time) {
    const auto n = t.dim();
    return std::cos(time) * RealMatrix::Identity(n, n) + std::sin(time) * t.j().matrix();
}

LinearField lie_bracket_fields(const LinearField& x, const LinearField& y) {
    return {-commutator(x.a, y.a)};
}

QuadraticForm poisson_bracket(const QuadraticForm& f, const QuadraticForm& h,
                              const SymplecticForm& omega) {
    const RealMatrix mf = hamiltonian_field(f, omega).a;
    const RealMatrix mh = hamiltonian_field(h, omega).a;
    // omega(X_h x, X_f x) = x^T (M_h^T omega M_f) x = 1/2 x^T Q x
    const RealMatrix x = mh.transpose() * omega.matrix() * mf;
    return QuadraticForm::from(x + x.transpose());
}

}  // namespace biham
