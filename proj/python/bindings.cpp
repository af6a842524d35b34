#include <optional>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "biham/document.hpp"
#include "biham/dynamics.hpp"
#include "biham/error.hpp"
#include "biham/operator_f.hpp"
#include "biham/pencil.hpp"

namespace py = pybind11;
using namespace biham;

namespace {

Tolerance tol_of(double rel, std::optional<double> cluster_gap) {
    Tolerance t;
    t.rel = rel;
    t.cluster_gap = cluster_gap.value_or(std::max(t.cluster_gap, rel));
    t.validate();
    return t;
}

py::list residual_list(const CheckReport& rep) {
    py::list out;
    for (const auto& r : rep.items())
        out.append(py::dict(py::arg("name") = r.name, py::arg("value") = r.value,
                            py::arg("limit") = r.limit, py::arg("ok") = r.ok()));
    return out;
}

AdmissibleTriple triple(const RealMatrix& g, const RealMatrix& w, const Tolerance& tol) {
    auto c = check_admissible(MetricTensor::from(g, tol), SymplecticForm::from(w, tol), tol);
    if (!c) throw InvalidInput("triple is not admissible: " + c.report.failures().front());
    return std::move(*c.value);
}

CompatiblePair pair(const RealMatrix& g1, const RealMatrix& w1, const RealMatrix& g2,
                    const RealMatrix& w2, const Tolerance& tol) {
    auto c = check_compatible(triple(g1, w1, tol), triple(g2, w2, tol), tol);
    if (!c) throw NumericalError("pair is not compatible: " + c.report.failures().front());
    return std::move(*c.value);
}

OperatorF operator_f(const ComplexMatrix& h1, const ComplexMatrix& h2, const Tolerance& tol) {
    return build_f(HermitianForm::from(h1, tol), HermitianForm::from(h2, tol), tol);
}

#define BIHAM_TOL_ARGS py::arg("rel") = 1e-9, py::arg("cluster_gap") = py::none()

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bi-Hermitian structure analysis";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def(
        "check_admissible",
        [](const RealMatrix& g, const RealMatrix& w, double rel, std::optional<double> gap) {
            const auto tol = tol_of(rel, gap);
            auto c = check_admissible(MetricTensor::from(g, tol), SymplecticForm::from(w, tol), tol);
            py::dict out;
            out["ok"] = c.ok();
            out["residuals"] = residual_list(c.report);
            out["j"] = c ? py::cast(RealMatrix(c.value->j().matrix())) : py::none();
            return out;
        },
        py::arg("g"), py::arg("omega"), BIHAM_TOL_ARGS,
        "Admissibility of (g, omega); J = g^-1 omega when admissible.");

    m.def(
        "check_compatible",
        [](const RealMatrix& g1, const RealMatrix& w1, const RealMatrix& g2, const RealMatrix& w2,
           double rel, std::optional<double> gap) {
            const auto tol = tol_of(rel, gap);
            auto c = check_compatible(triple(g1, w1, tol), triple(g2, w2, tol), tol);
            py::dict out;
            out["ok"] = c.ok();
            out["residuals"] = residual_list(c.report);
            py::list v;
            for (const auto& f : c.report.failures()) v.append(violation_text(f));
            out["violations"] = v;
            if (c) {
                out["G"] = c.value->big_g();
                out["T"] = c.value->big_t();
            }
            return out;
        },
        py::arg("g1"), py::arg("omega1"), py::arg("g2"), py::arg("omega2"), BIHAM_TOL_ARGS);

    m.def(
        "decompose",
        [](const RealMatrix& g1, const RealMatrix& w1, const RealMatrix& g2, const RealMatrix& w2,
           double rel, std::optional<double> gap) {
            const auto d = decompose(pair(g1, w1, g2, w2, tol_of(rel, gap)));
            py::list out;
            for (const auto& b : d.blocks)
                out.append(py::dict(py::arg("lambda") = b.lambda, py::arg("sign") = b.sign,
                                    py::arg("dim") = b.dim, py::arg("rho") = b.rho,
                                    py::arg("basis") = b.basis));
            return out;
        },
        py::arg("g1"), py::arg("omega1"), py::arg("g2"), py::arg("omega2"), BIHAM_TOL_ARGS,
        "Blocks ordered by ascending lambda, sign +1 first.");

    m.def(
        "group_signature",
        [](const RealMatrix& g1, const RealMatrix& w1, const RealMatrix& g2, const RealMatrix& w2,
           double rel, std::optional<double> gap) {
            const auto s = group_signature(decompose(pair(g1, w1, g2, w2, tol_of(rel, gap))));
            return py::make_tuple(s.complex_form(), s.real_form(), s.algebra_dim());
        },
        py::arg("g1"), py::arg("omega1"), py::arg("g2"), py::arg("omega2"), BIHAM_TOL_ARGS,
        "(complex form, real form, Lie algebra dimension).");

    m.def(
        "bi_preserving_algebra_dim",
        [](const RealMatrix& g1, const RealMatrix& w1, const RealMatrix& g2, const RealMatrix& w2,
           double rel, std::optional<double> gap) {
            const auto a = bi_preserving_algebra(pair(g1, w1, g2, w2, tol_of(rel, gap)));
            return py::make_tuple(a.dim, a.expected_dim);
        },
        py::arg("g1"), py::arg("omega1"), py::arg("g2"), py::arg("omega2"), BIHAM_TOL_ARGS,
        "(computed, expected) dimensions.");

    m.def(
        "recursion_certificate",
        [](const RealMatrix& g1, const RealMatrix& w1, const RealMatrix& g2, const RealMatrix& w2,
           double rel, std::optional<double> gap) {
            const auto p = pair(g1, w1, g2, w2, tol_of(rel, gap));
            const auto c = certify_recursion(recursion_basis(p), p);
            return py::dict(py::arg("rank") = c.rank.rank, py::arg("t_clusters") = c.t_clusters,
                            py::arg("max_commutator") = c.max_commutator,
                            py::arg("nijenhuis_residual") = c.nijenhuis_residual,
                            py::arg("preserves") = c.preserves, py::arg("ok") = c.ok());
        },
        py::arg("g1"), py::arg("omega1"), py::arg("g2"), py::arg("omega2"), BIHAM_TOL_ARGS);

    m.def(
        "positivity_range",
        [](const RealMatrix& g1, const RealMatrix& w1, const RealMatrix& g2, const RealMatrix& w2,
           double rel, std::optional<double> gap) {
            const auto r = positivity_range(pair(g1, w1, g2, w2, tol_of(rel, gap)));
            return py::make_tuple(r.lower, r.upper);
        },
        py::arg("g1"), py::arg("omega1"), py::arg("g2"), py::arg("omega2"), BIHAM_TOL_ARGS);

    m.def(
        "pencil_member",
        [](const RealMatrix& g1, const RealMatrix& w1, const RealMatrix& g2, const RealMatrix& w2,
           double gamma, double rel, std::optional<double> gap) {
            const auto mem = pencil_member(pair(g1, w1, g2, w2, tol_of(rel, gap)), gamma);
            py::list blocks;
            for (const auto& b : mem.blocks)
                blocks.append(py::dict(py::arg("lambda") = b.lambda, py::arg("sign") = b.sign,
                                       py::arg("factor") = b.measured_factor,
                                       py::arg("j_squared") = b.j_squared,
                                       py::arg("admissible") = b.admissible));
            return py::dict(py::arg("j") = mem.j_gamma, py::arg("admissible") = mem.admissible,
                            py::arg("blocks") = blocks);
        },
        py::arg("g1"), py::arg("omega1"), py::arg("g2"), py::arg("omega2"), py::arg("gamma"),
        BIHAM_TOL_ARGS);

    m.def(
        "flow", [](const RealMatrix& a, double t) { return flow(LinearField{a}, t); },
        py::arg("a"), py::arg("t"), "exp(t A).");

    m.def(
        "synthesize_pair",
        [](const std::string& spec, std::uint64_t seed, bool general) {
            const auto p = synthesize_pair(parse_block_spec(spec), seed,
                                           general ? SynthFrame::General : SynthFrame::Unitary);
            return py::dict(py::arg("g1") = p.t1().g().matrix(),
                            py::arg("omega1") = p.t1().omega().matrix(),
                            py::arg("g2") = p.t2().g().matrix(),
                            py::arg("omega2") = p.t2().omega().matrix());
        },
        py::arg("spec"), py::arg("seed"), py::arg("general") = false,
        "Compatible pair with prescribed blocks, e.g. spec='2:+:1,3:-:1'.");

    m.def(
        "commutant_dim",
        [](const ComplexMatrix& h1, const ComplexMatrix& h2, double rel, std::optional<double> gap) {
            return commutant_dim(operator_f(h1, h2, tol_of(rel, gap)));
        },
        py::arg("h1"), py::arg("h2"), BIHAM_TOL_ARGS);

    m.def(
        "bicommutant_dim",
        [](const ComplexMatrix& h1, const ComplexMatrix& h2, double rel, std::optional<double> gap) {
            return bicommutant_dim(operator_f(h1, h2, tol_of(rel, gap)));
        },
        py::arg("h1"), py::arg("h2"), BIHAM_TOL_ARGS);

    m.def(
        "is_generic_f",
        [](const ComplexMatrix& h1, const ComplexMatrix& h2, double rel, std::optional<double> gap) {
            return is_generic_f(operator_f(h1, h2, tol_of(rel, gap)));
        },
        py::arg("h1"), py::arg("h2"), BIHAM_TOL_ARGS);

    m.def(
        "biunitary_sample",
        [](const ComplexMatrix& h1, const ComplexMatrix& h2, const std::vector<double>& coeffs,
           double t) {
            const auto s = biunitary_sample(operator_f(h1, h2, Tolerance{}), coeffs, t);
            return py::make_tuple(s.u, s.residual_h1, s.residual_h2);
        },
        py::arg("h1"), py::arg("h2"), py::arg("coeffs"), py::arg("t"),
        "(U, residual wrt h1, residual wrt h2) for U = exp(i f(F) t).");

    m.def(
        "analyze",
        [](const std::string& document, const std::string& command, std::optional<double> gamma,
           std::optional<double> rel) {
            Command cmd;
            if (command == "check") cmd = Command::Check;
            else if (command == "decompose") cmd = Command::Decompose;
            else if (command == "recursion") cmd = Command::Recursion;
            else if (command == "pencil") cmd = Command::Pencil;
            else if (command == "commutant") cmd = Command::Commutant;
            else throw InvalidInput("unknown command \"" + command + "\"");
            const auto doc = parse_input_text(document);
            const auto tol = resolve_tolerance(rel, doc, nullptr);
            AnalysisOptions opts;
            opts.gamma = gamma;
            const auto a = analyze(cmd, doc, tol, opts);
            return py::make_tuple(render(a.report), a.exit_code);
        },
        py::arg("document"), py::arg("command") = "check", py::arg("gamma") = py::none(),
        py::arg("rel") = py::none(),
        "Runs a CLI command on a JSON document; returns (report JSON, exit code).");
}
