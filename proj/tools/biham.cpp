// biham: command line front end.
//
// Exit codes: 0 every check passed, 1 a mathematical check failed,
// 2 malformed input or I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "biham/document.hpp"
#include "biham/error.hpp"

namespace {

constexpr int kExitMalformed = 2;

struct AnalysisArgs {
    std::string path;
    std::optional<double> tol;
    std::string output;
    std::optional<double> gamma;
};

CLI::App* add_analysis(CLI::App& app, const char* name, const char* help, AnalysisArgs& args) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("file", args.path, "Input JSON document")->required();
    sub->add_option("--tol", args.tol, "Relative tolerance (overrides the file and BIHAM_TOL)");
    sub->add_option("--output,-o", args.output, "Write the report here instead of stdout");
    return sub;
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty())
        std::cout << text;
    else
        biham::write_atomic(output, text);
}

int run_analysis(biham::Command cmd, const AnalysisArgs& args) {
    const auto doc = biham::load_input(args.path);
    const auto tol = biham::resolve_tolerance(args.tol, doc, std::getenv("BIHAM_TOL"));
    biham::AnalysisOptions opts;
    opts.gamma = args.gamma;
    const auto result = biham::analyze(cmd, doc, tol, opts);
    emit(biham::render(result.report), args.output);
    if (result.exit_code != 0) {
        std::cerr << "biham " << biham::command_name(cmd) << ": "
                  << result.report["verdict"].get<std::string>();
        if (result.report.contains("error"))
            std::cerr << " (" << result.report["error"].get<std::string>() << ")";
        std::cerr << "\n";
    }
    return result.exit_code;
}

int run_synth(const std::string& spec_text, std::uint64_t seed, const std::string& out,
              bool general) {
    const auto spec = biham::parse_block_spec(spec_text);
    const auto pair = biham::synthesize_pair(
        spec, seed, general ? biham::SynthFrame::General : biham::SynthFrame::Unitary);
    biham::write_atomic(out, biham::render(biham::to_json(biham::document_for(pair))));
    biham::Json summary;
    summary["schema_version"] = biham::kSchemaVersion;
    summary["command"] = "synth";
    summary["spec"] = biham::format_block_spec(spec);
    summary["seed"] = seed;
    summary["frame"] = general ? "general" : "unitary";
    summary["dim"] = pair.dim();
    summary["out"] = out;
    std::cout << biham::render(summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bi-Hermitian structure analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "biham 0.1.0");

    AnalysisArgs check_args, decompose_args, recursion_args, pencil_args, commutant_args;
    auto* check = add_analysis(app, "check", "Admissibility and compatibility", check_args);
    auto* decompose = add_analysis(app, "decompose", "Block decomposition and signatures",
                                   decompose_args);
    auto* recursion = add_analysis(app, "recursion", "Recursion certificate and conservation",
                                   recursion_args);
    auto* pencil = add_analysis(app, "pencil", "One member of the pencil", pencil_args);
    pencil->add_option("--gamma", pencil_args.gamma, "Pencil parameter")->required();
    auto* commutant =
        add_analysis(app, "commutant", "Commutant and bicommutant of F", commutant_args);

    std::string spec, out;
    std::uint64_t seed = 0;
    bool general = false;
    auto* synth = app.add_subcommand("synth", "Write a compatible pair with a prescribed spectrum");
    synth->add_option("--spec", spec, "lambda:sign:multiplicity,...")->required();
    synth->add_option("--seed", seed, "Random seed")->required();
    synth->add_option("--out", out, "Output JSON document")->required();
    synth->add_flag("--general", general, "Also apply a random non-orthogonal frame change");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitMalformed;
    }

    try {
        if (*check) return run_analysis(biham::Command::Check, check_args);
        if (*decompose) return run_analysis(biham::Command::Decompose, decompose_args);
        if (*recursion) return run_analysis(biham::Command::Recursion, recursion_args);
        if (*pencil) return run_analysis(biham::Command::Pencil, pencil_args);
        if (*commutant) return run_analysis(biham::Command::Commutant, commutant_args);
        if (*synth) return run_synth(spec, seed, out, general);
    } catch (const biham::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMalformed;
    } catch (const biham::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMalformed;
    }
    return kExitMalformed;
}
