#include "biham/compatibility.hpp"

#include "biham/error.hpp"

namespace biham {

namespace {

double prod_scale(std::initializer_list<const RealMatrix*> ms) {
    double s = 1.0;
    for (const auto* m : ms) s *= scale_of(*m);
    return s;
}

void add_commutator(CheckReport& r, const char* name, const RealMatrix& a, const RealMatrix& b,
                    const Tolerance& tol) {
    r.add(name, inf_norm(commutator(a, b)), tol.rel * prod_scale({&a, &b}));
}

void add_self_adjoint(CheckReport& r, const char* name, const RealMatrix& a, const RealMatrix& g,
                      const Tolerance& tol) {
    const RealMatrix ga = g * a;
    r.add(name, inf_norm(RealMatrix(ga - ga.transpose())), tol.rel * prod_scale({&a, &g}));
}

void add_bracket(CheckReport& r, const char* name, const RealMatrix& g1, const RealMatrix& g2,
                 const SymplecticForm& omega, const Tolerance& tol) {
    const auto f = QuadraticForm::from(g1, tol);
    const auto h = QuadraticForm::from(g2, tol);
    const RealMatrix mf = hamiltonian_field(f, omega).a;
    const RealMatrix mh = hamiltonian_field(h, omega).a;
    const RealMatrix q = poisson_bracket(f, h, omega).matrix();
    r.add(name, inf_norm(q), 2.0 * tol.rel * prod_scale({&mh, &omega.matrix(), &mf}));
}

}  // namespace

CheckReport relation_suite(const AdmissibleTriple& t1, const AdmissibleTriple& t2,
                           const RealMatrix& big_g, const RealMatrix& big_t,
                           const Tolerance& tol) {
    const RealMatrix& g1 = t1.g().matrix();
    const RealMatrix& g2 = t2.g().matrix();
    const RealMatrix& j1 = t1.j().matrix();
    const RealMatrix& j2 = t2.j().matrix();

    CheckReport r;
    r.add("G = -J1 T J2", inf_norm(RealMatrix(big_g + j1 * big_t * j2)),
          tol.rel * std::max(scale_of(big_g), prod_scale({&j1, &big_t, &j2})));
    add_commutator(r, "[G,J1] = 0", big_g, j1, tol);
    add_commutator(r, "[G,J2] = 0", big_g, j2, tol);
    add_commutator(r, "[T,J1] = 0", big_t, j1, tol);
    add_commutator(r, "[T,J2] = 0", big_t, j2, tol);
    add_commutator(r, "[G,T] = 0", big_g, big_t, tol);
    add_self_adjoint(r, "G self-adjoint wrt g1", big_g, g1, tol);
    add_self_adjoint(r, "G self-adjoint wrt g2", big_g, g2, tol);
    add_self_adjoint(r, "T self-adjoint wrt g1", big_t, g1, tol);
    add_self_adjoint(r, "T self-adjoint wrt g2", big_t, g2, tol);
    r.add("(J1^+)_2 = -J1", inf_norm(RealMatrix(metric_adjoint(j1, g2) + j1)),
          tol.rel * prod_scale({&j1, &g2}) * scale_of(RealMatrix(g2.inverse())));
    r.add("(J2^+)_1 = -J2", inf_norm(RealMatrix(metric_adjoint(j2, g1) + j2)),
          tol.rel * prod_scale({&j2, &g1}) * scale_of(RealMatrix(g1.inverse())));
    r.add("g1(Gx,y) = g2(x,y)", inf_norm(RealMatrix(g1 * big_g - g2)),
          tol.rel * prod_scale({&g1, &big_g}));
    add_commutator(r, relation::kJ1J2Commute, j1, j2, tol);
    add_bracket(r, "{g1,g2}_1 = 0", g1, g2, t1.omega(), tol);
    add_bracket(r, "{g1,g2}_2 = 0", g1, g2, t2.omega(), tol);
    return r;
}

Checked<CompatiblePair> check_compatible(const AdmissibleTriple& t1, const AdmissibleTriple& t2,
                                         const Tolerance& tol) {
    if (t1.dim() != t2.dim()) throw InvalidInput("check_compatible: dimension mismatch");
    tol.validate();

    const RealMatrix& g1 = t1.g().matrix();
    const RealMatrix& g2 = t2.g().matrix();
    const RealMatrix& w1 = t1.omega().matrix();
    const RealMatrix& w2 = t2.omega().matrix();
    const RealMatrix& j1 = t1.j().matrix();
    const RealMatrix& j2 = t2.j().matrix();

    Checked<CompatiblePair> out;
    CheckReport& r = out.report;
    {
        const RealMatrix a = g2 * j1;
        r.add(relation::kG2PreservedByGamma1, inf_norm(RealMatrix(a + a.transpose())),
              tol.rel * prod_scale({&g2, &j1}));
        const RealMatrix b = w2 * j1;
        r.add(relation::kOmega2PreservedByGamma1, inf_norm(RealMatrix(b - b.transpose())),
              tol.rel * prod_scale({&w2, &j1}));
        const RealMatrix c = g1 * j2;
        r.add(relation::kG1PreservedByGamma2, inf_norm(RealMatrix(c + c.transpose())),
              tol.rel * prod_scale({&g1, &j2}));
        const RealMatrix d = w1 * j2;
        r.add(relation::kOmega1PreservedByGamma2, inf_norm(RealMatrix(d - d.transpose())),
              tol.rel * prod_scale({&w1, &j2}));
    }
    if (!r.ok()) {
        add_commutator(r, relation::kJ1J2Commute, j1, j2, tol);
        return out;
    }

    RealMatrix big_g = Eigen::LLT<RealMatrix>(g1).solve(g2);
    RealMatrix big_t = Eigen::PartialPivLU<RealMatrix>(w1).solve(w2);
    r.append(relation_suite(t1, t2, big_g, big_t, tol));
    if (r.ok())
        out.value = CompatiblePair(t1, t2, std::move(big_g), std::move(big_t), r, tol);
    return out;
}

CheckReport verify_relation_suite(const CompatiblePair& p) {
    return relation_suite(p.t1(), p.t2(), p.big_g(), p.big_t(), p.tolerance());
}

GammaRange positivity_range(const CompatiblePair& p) {
    const auto eig = eig_self_adjoint(p.big_g(), p.t1().g().matrix(), p.tolerance());
    const double lambda_max = eig.values.back();
    if (!(eig.values.front() > 0.0))
        throw NumericalError("positivity_range: G has a non-positive eigenvalue");
    return {-1.0 / lambda_max, std::numeric_limits<double>::infinity()};
}

}  // namespace biham
