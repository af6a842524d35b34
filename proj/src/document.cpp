#include "biham/document.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "biham/dynamics.hpp"
#include "biham/error.hpp"
#include "biham/operator_f.hpp"
#include "biham/pencil.hpp"

namespace biham {

namespace {

constexpr double kConservationLimit = 1e-9;
constexpr double kConservationHorizon = 10.0;
constexpr std::size_t kConservationSamples = 100;

double number_field(const Json& v, const std::string& what) {
    if (!v.is_number()) throw InvalidInput(what + " must be a number");
    return v.get<double>();
}

RealMatrix parse_matrix(const Json& v, Eigen::Index dim, const std::string& name) {
    if (!v.is_array()) throw InvalidInput(name + " must be an array of rows");
    if (static_cast<Eigen::Index>(v.size()) != dim) {
        std::ostringstream os;
        os << name << " must have " << dim << " rows, got " << v.size();
        throw InvalidInput(os.str());
    }
    RealMatrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const Json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
            std::ostringstream os;
            os << name << " row " << i << " must be an array of " << dim << " numbers";
            throw InvalidInput(os.str());
        }
        for (Eigen::Index k = 0; k < dim; ++k) {
            const Json& x = row[static_cast<std::size_t>(k)];
            if (!x.is_number()) {
                std::ostringstream os;
                os << name << "[" << i << "][" << k << "] must be a number";
                throw InvalidInput(os.str());
            }
            m(i, k) = x.get<double>();
        }
    }
    return m;
}

Tolerance parse_tol(const Json& v) {
    Tolerance t;
    if (v.is_number()) {
        t.rel = v.get<double>();
        t.cluster_gap = std::max(t.cluster_gap, t.rel);
    } else if (v.is_object()) {
        for (const auto& [key, val] : v.items()) {
            if (key == "rel")
                t.rel = number_field(val, "tol.rel");
            else if (key == "cluster_gap")
                t.cluster_gap = number_field(val, "tol.cluster_gap");
            else
                throw InvalidInput("tol: unknown field \"" + key + "\"");
        }
        if (!v.contains("cluster_gap")) t.cluster_gap = std::max(t.cluster_gap, t.rel);
    } else {
        throw InvalidInput("tol must be a number or an object {rel, cluster_gap}");
    }
    t.validate();
    return t;
}

Json residual_json(const Residual& r) {
    return Json{{"name", r.name}, {"value", r.value}, {"limit", r.limit}, {"ok", r.ok()}};
}

void append_residuals(Json& out, const CheckReport& rep, const std::string& prefix) {
    for (const auto& r : rep.items()) {
        Json j = residual_json(r);
        j["name"] = prefix + r.name;
        out.push_back(std::move(j));
    }
}

Json violations(const CheckReport& rep) {
    Json v = Json::array();
    for (const auto& name : rep.failures()) v.push_back(violation_text(name));
    return v;
}

const char* sign_text(int s) { return s > 0 ? "+" : "-"; }

struct TripleOutcome {
    std::optional<AdmissibleTriple> triple;
    Json verdict;
};

TripleOutcome build_triple(const RealMatrix& g, const RealMatrix& w, const Tolerance& tol,
                           const std::string& label, Json& residuals) {
    TripleOutcome out;
    try {
        const auto metric = MetricTensor::from(g, tol);
        const auto form = SymplecticForm::from(w, tol);
        auto checked = check_admissible(metric, form, tol);
        append_residuals(residuals, checked.report, label + ": ");
        out.verdict = Json{{"ok", checked.ok()}, {"violations", violations(checked.report)}};
        if (checked.ok()) out.triple = std::move(*checked.value);
    } catch (const InvalidInput& e) {
        // The file is well formed but the matrices are not a metric / form.
        out.verdict = Json{{"ok", false}, {"violations", Json::array()}, {"error", e.what()}};
    }
    return out;
}

Json certificate_json(const RecursionCertificate& c, std::size_t n) {
    return Json{{"n", n},
                {"rank", c.rank.rank},
                {"t_clusters", c.t_clusters},
                {"preserves", c.preserves},
                {"max_commutator", c.max_commutator},
                {"commute", c.commute},
                {"independent", c.independent},
                {"vandermonde_consistent", c.vandermonde_consistent},
                {"nijenhuis_residual", c.nijenhuis_residual},
                {"nijenhuis", c.nijenhuis}};
}

// Certificate conditions that must hold for every compatible pair; rank == n
// is only expected in the generic case.
bool certificate_sound(const RecursionCertificate& c) {
    return c.preserves && c.commute && c.vandermonde_consistent && c.nijenhuis;
}

std::string pencil_summary(const PencilMember& m) {
    std::string s = "admissible:";
    for (std::size_t k = 0; k < m.blocks.size(); ++k) {
        s += (k == 0 ? " " : ", ");
        s += "block" + std::to_string(k + 1) + (m.blocks[k].admissible ? " yes" : " no");
    }
    return s;
}

}  // namespace

InputDocument parse_input(const Json& doc) {
    if (!doc.is_object()) throw InvalidInput("input must be a JSON object");
    static const char* const known[] = {"dim", "g1", "omega1", "g2", "omega2", "tol"};
    for (const auto& [key, val] : doc.items()) {
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return key == k; }) == std::end(known))
            throw InvalidInput("unknown field \"" + key + "\"");
    }

    InputDocument in;
    if (!doc.contains("dim")) throw InvalidInput("missing field \"dim\"");
    const Json& dim = doc["dim"];
    if (!dim.is_number_integer()) throw InvalidInput("dim must be an integer");
    const auto d = dim.get<long long>();
    if (d <= 0) throw InvalidInput("dimension must be positive");
    if (d % 2 != 0) throw InvalidInput("dimension must be even");
    in.dim = static_cast<Eigen::Index>(d);

    for (const char* req : {"g1", "omega1"})
        if (!doc.contains(req)) throw InvalidInput(std::string("missing field \"") + req + "\"");
    in.g1 = parse_matrix(doc["g1"], in.dim, "g1");
    in.omega1 = parse_matrix(doc["omega1"], in.dim, "omega1");

    if (doc.contains("g2") != doc.contains("omega2"))
        throw InvalidInput("g2 and omega2 must be given together");
    if (doc.contains("g2")) {
        in.g2 = parse_matrix(doc["g2"], in.dim, "g2");
        in.omega2 = parse_matrix(doc["omega2"], in.dim, "omega2");
    }
    if (doc.contains("tol")) in.tol = parse_tol(doc["tol"]);
    return in;
}

InputDocument parse_input_text(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InvalidInput(std::string("invalid JSON: ") + e.what());
    }
    return parse_input(doc);
}

InputDocument load_input(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot read " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    try {
        return parse_input_text(buf.str());
    } catch (const InvalidInput& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

Json matrix_to_json(const RealMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const InputDocument& doc) {
    Json j;
    j["dim"] = doc.dim;
    j["g1"] = matrix_to_json(doc.g1);
    j["omega1"] = matrix_to_json(doc.omega1);
    if (doc.g2) {
        j["g2"] = matrix_to_json(*doc.g2);
        j["omega2"] = matrix_to_json(*doc.omega2);
    }
    if (doc.tol) j["tol"] = Json{{"rel", doc.tol->rel}, {"cluster_gap", doc.tol->cluster_gap}};
    return j;
}

InputDocument document_for(const CompatiblePair& p) {
    InputDocument d;
    d.dim = p.dim();
    d.g1 = p.t1().g().matrix();
    d.omega1 = p.t1().omega().matrix();
    d.g2 = p.t2().g().matrix();
    d.omega2 = p.t2().omega().matrix();
    return d;
}

Tolerance resolve_tolerance(std::optional<double> flag_rel, const InputDocument& doc,
                            const char* env_value) {
    Tolerance t;
    if (env_value != nullptr && *env_value != '\0') {
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(env_value, &end);
        if (errno != 0 || end == env_value || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
            throw InvalidInput(std::string("BIHAM_TOL must be a positive number, got \"") +
                               env_value + "\"");
        t.rel = v;
    }
    if (doc.tol) t = *doc.tol;
    if (flag_rel) t.rel = *flag_rel;
    t.cluster_gap = std::max(t.cluster_gap, t.rel);
    t.validate();
    return t;
}

const char* command_name(Command c) {
    switch (c) {
        case Command::Check: return "check";
        case Command::Decompose: return "decompose";
        case Command::Recursion: return "recursion";
        case Command::Pencil: return "pencil";
        case Command::Commutant: return "commutant";
    }
    return "?";
}

std::string violation_text(const std::string& relation) {
    static const std::string eq = " = ";
    static const std::string sym = " symmetric";
    if (const auto pos = relation.rfind(eq); pos != std::string::npos)
        return relation.substr(0, pos) + " ≠ " + relation.substr(pos + eq.size());
    if (relation.size() > sym.size() &&
        relation.compare(relation.size() - sym.size(), sym.size(), sym) == 0)
        return relation.substr(0, relation.size() - sym.size()) + " not symmetric";
    return "violated: " + relation;
}

Analysis analyze(Command cmd, const InputDocument& doc, const Tolerance& tol,
                 const AnalysisOptions& opts) {
    tol.validate();
    const std::string name = command_name(cmd);
    if (cmd != Command::Check && !doc.has_pair())
        throw InvalidInput(name + ": input needs g2 and omega2");
    if (cmd == Command::Pencil && !opts.gamma) throw InvalidInput("pencil: --gamma is required");
    if (opts.gamma && !std::isfinite(*opts.gamma)) throw InvalidInput("gamma must be finite");

    Analysis a;
    Json& r = a.report;
    r["schema_version"] = kSchemaVersion;
    r["command"] = name;
    r["dim"] = doc.dim;
    r["tolerance"] = Json{{"rel", tol.rel}, {"cluster_gap", tol.cluster_gap}};
    r["verdict"] = nullptr;
    r["admissible"] = Json::object();
    for (const char* key : {"compatible", "blocks", "generic", "signature_complex",
                            "signature_real", "recursion", "pencil_range", "algebra_dim"})
        r[key] = nullptr;
    r["residuals"] = Json::array();
    Json& residuals = r["residuals"];

    auto fail = [&](const std::string& verdict) {
        r["verdict"] = verdict;
        a.exit_code = 1;
        return a;
    };

    auto t1 = build_triple(doc.g1, doc.omega1, tol, "triple1", residuals);
    r["admissible"]["triple1"] = t1.verdict;
    std::optional<TripleOutcome> t2;
    if (doc.has_pair()) {
        t2 = build_triple(*doc.g2, *doc.omega2, tol, "triple2", residuals);
        r["admissible"]["triple2"] = t2->verdict;
    }
    if (!t1.triple || (t2 && !t2->triple)) return fail("inadmissible");
    if (!t2) {
        r["verdict"] = "admissible";
        return a;
    }

    auto checked = check_compatible(*t1.triple, *t2->triple, tol);
    append_residuals(residuals, checked.report, "compatibility: ");
    const Residual* comm = checked.report.find(relation::kJ1J2Commute);
    r["compatible"] = Json{{"ok", checked.ok()},
                           {"violations", violations(checked.report)},
                           {"j1_j2_commutator", comm ? comm->value : 0.0}};
    if (!checked) return fail("incompatible");
    const CompatiblePair& p = *checked.value;

    try {
        const auto d = decompose(p);
        Json blocks = Json::array();
        for (const auto& b : d.blocks) {
            blocks.push_back(Json{{"lambda", b.lambda},
                                  {"sign", sign_text(b.sign)},
                                  {"dim", b.dim},
                                  {"multiplicity", b.dim / 2},
                                  {"rho", b.rho},
                                  {"max_residual", b.residuals.max_value()}});
            append_residuals(residuals, b.residuals,
                             "block(" + std::to_string(blocks.size()) + "): ");
        }
        r["blocks"] = std::move(blocks);
        residuals.push_back(Json{{"name", "blocks: cross terms"},
                                 {"value", d.cross_residual},
                                 {"limit", tol.rel * scale_of(p.t1().g().matrix())},
                                 {"ok", d.cross_residual <= tol.rel * scale_of(p.t1().g().matrix())}});

        const auto cx = complexify(p, d);
        const auto f = build_f(cx.h1, cx.h2, tol);
        const bool generic_f = is_generic_f(f);
        r["generic"] = Json{{"real", is_generic(d)}, {"operator_f", generic_f}};

        const auto sig = group_signature(d);
        r["signature_complex"] = sig.complex_form();
        r["signature_real"] = sig.real_form();

        const auto rb = recursion_basis(p);
        const auto cert = certify_recursion(rb, p);
        Json rec = certificate_json(cert, static_cast<std::size_t>(p.n()));
        bool sound = certificate_sound(cert);
        if (cmd == Command::Recursion) {
            const auto times = sample_times(0.0, kConservationHorizon, kConservationSamples);
            Json drifts = Json::array();
            double worst = 0.0;
            for (const auto& field : rb.fields) {
                const auto c = conservation_probe(field, p, times);
                drifts.push_back(Json{{"g1", c.g1}, {"omega1", c.omega1}, {"g2", c.g2},
                                      {"omega2", c.omega2}});
                worst = std::max(worst, c.max());
            }
            r["conservation"] = Json{{"t_max", kConservationHorizon},
                                     {"samples", kConservationSamples},
                                     {"limit", kConservationLimit},
                                     {"max_drift", worst},
                                     {"per_field", std::move(drifts)}};
            sound = sound && worst <= kConservationLimit;
        }
        rec["ok"] = sound;
        r["recursion"] = std::move(rec);

        const auto range = positivity_range(p);
        r["pencil_range"] = Json{{"lower", range.lower}, {"upper", "+inf"}};

        const auto alg = bi_preserving_algebra(p);
        r["algebra_dim"] = Json{{"computed", alg.dim},
                                {"expected", alg.expected_dim},
                                {"ok", alg.dim == alg.expected_dim}};

        bool pass = sound && alg.dim == alg.expected_dim;
        for (const auto& item : residuals) pass = pass && item["ok"].get<bool>();

        if (cmd == Command::Pencil) {
            const double gamma = *opts.gamma;
            if (!range.contains(gamma)) {
                std::ostringstream os;
                os << "pencil: gamma = " << gamma << " is outside the positivity range ("
                   << range.lower << ", +inf)";
                throw InvalidInput(os.str());
            }
            const auto m = pencil_member(p, d, gamma);
            Json pb = Json::array();
            for (const auto& b : m.blocks)
                pb.push_back(Json{{"lambda", b.lambda},
                                  {"sign", sign_text(b.sign)},
                                  {"dim", b.dim},
                                  {"predicted_factor", b.predicted_factor},
                                  {"measured_factor", b.measured_factor},
                                  {"j_squared", matrix_to_json(b.j_squared)},
                                  {"residual", b.residual},
                                  {"limit", b.limit},
                                  {"admissible", b.admissible}});
            r["pencil"] = Json{{"gamma", gamma},
                               {"admissible", m.admissible},
                               {"residual", m.residual},
                               {"summary", pencil_summary(m)},
                               {"blocks", std::move(pb)}};
        }

        if (cmd == Command::Commutant) {
            const auto c = commutant(f);
            const auto bc = bicommutant(f, c);
            const auto clusters = f_clusters(f);
            std::size_t expected = 0;
            Json mult = Json::array();
            for (const auto& k : clusters) {
                expected += k.multiplicity * k.multiplicity;
                mult.push_back(k.multiplicity);
            }
            const auto nb = norm_bounds(f);
            const auto u = biunitary_sample(f, {0.0, 1.0}, 1.0);
            Json signs = Json::array();
            for (int s : cx.sign_pattern) signs.push_back(sign_text(s));
            const double ulimit = tol.rel * scale_of(f.h2.matrix());
            r["operator_f"] =
                Json{{"complex_dim", f.f.rows()},
                     {"eigenvalues", f.eigenvalues},
                     {"sign_pattern", std::move(signs)},
                     {"cluster_multiplicities", std::move(mult)},
                     {"commutant_dim", c.dim},
                     {"expected_commutant_dim", expected},
                     {"bicommutant_dim", bc.dim},
                     {"generic", generic_f},
                     {"norm_bounds", Json{{"a", nb.a},
                                          {"b", nb.b},
                                          {"lambda_min", nb.lambda_min},
                                          {"lambda_max", nb.lambda_max},
                                          {"norm_f", nb.norm_f},
                                          {"chain_slack", nb.chain_slack}}},
                     {"biunitary_residual", Json{{"h1", u.residual_h1},
                                                 {"h2", u.residual_h2},
                                                 {"limit", ulimit}}}};
            pass = pass && c.dim == expected && bc.dim == clusters.size() &&
                   u.residual_h1 <= ulimit && u.residual_h2 <= ulimit;
        }

        if (!pass) return fail("compatible, certificate failed");
        r["verdict"] = "compatible";
    } catch (const NumericalError& e) {
        r["error"] = e.what();
        return fail("compatible, analysis failed");
    }
    return a;
}

std::string render(const Json& j) { return j.dump(2) + "\n"; }

void write_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw InvalidInput("cannot write " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InvalidInput("cannot rename onto " + path);
    }
}

}  // namespace biham
