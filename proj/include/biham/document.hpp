#pragma once

// Input documents and analysis reports. JSON in, JSON out; the CLI and the
// Python module are thin shells around these functions.

#include <optional>
#include <string>

#include <json.hpp>

#include "biham/decomposition.hpp"

namespace biham {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct InputDocument {
    Eigen::Index dim = 0;
    RealMatrix g1;
    RealMatrix omega1;
    std::optional<RealMatrix> g2;
    std::optional<RealMatrix> omega2;
    std::optional<Tolerance> tol;

    [[nodiscard]] bool has_pair() const { return g2.has_value(); }
};

/// Schema validation only; the mathematics is left to the analysis. Throws
/// InvalidInput with a message naming the offending field.
InputDocument parse_input(const Json& doc);
InputDocument parse_input_text(const std::string& text);
InputDocument load_input(const std::string& path);

Json matrix_to_json(const RealMatrix& m);
Json to_json(const InputDocument& doc);
InputDocument document_for(const CompatiblePair& p);

/// Precedence: explicit rel > the file's tol > BIHAM_TOL > defaults. A rel
/// larger than the cluster gap drags the gap up with it.
Tolerance resolve_tolerance(std::optional<double> flag_rel, const InputDocument& doc,
                            const char* env_value);

enum class Command { Check, Decompose, Recursion, Pencil, Commutant };

const char* command_name(Command c);

struct AnalysisOptions {
    std::optional<double> gamma;  // required for Pencil
};

struct Analysis {
    Json report;
    int exit_code = 0;  // 0 pass, 1 a mathematical check failed
};

/// Runs the pipeline for one command. Malformed requests (missing pair,
/// missing gamma, gamma outside the positivity range) throw InvalidInput.
Analysis analyze(Command cmd, const InputDocument& doc, const Tolerance& tol,
                 const AnalysisOptions& opts = {});

/// "X = 0" -> "X ≠ 0"; other names get a "violated: " prefix.
std::string violation_text(const std::string& relation);

/// Two-space indented JSON with a trailing newline.
std::string render(const Json& j);

/// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::string& path, const std::string& text);

}  // namespace biham
