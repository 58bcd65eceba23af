#pragma once

#include <json.hpp>

#include "diag/build.hpp"
#include "diag/decision.hpp"

namespace diag {

// Sequence wire format: {"prefix": ["p/q", ...], "pos_tail": {"comps": [...]},
// "neg_tail": {...}, "zeros": n | "inf"}. Rationals travel as strings.
nlohmann::json sequence_to_json(const ExtendedSequence& s);
ExtendedSequence sequence_from_json(const nlohmann::json& j);

nlohmann::json verdict_to_json(const Verdict& v);

// Round-trip helpers for XNat counts: nonnegative integer or "inf".
nlohmann::json xnat_to_json(const XNat& x);
XNat xnat_from_json(const nlohmann::json& j);

struct ProblemOptions {
  int precision_level = 1;   // 1, 2, or 3
  long truncation = 200;     // builder window N
  std::string format = "text";  // "text" or "json"
};

// A full problem instance as read from disk: the eigenvalue list, the candidate
// diagonal, and run options. parse -> serialize -> parse is the identity.
struct ProblemSpec {
  ExtendedSequence lambda;
  ExtendedSequence d;
  ProblemOptions options;
};

nlohmann::json problem_to_json(const ProblemSpec& p);
ProblemSpec problem_from_json(const nlohmann::json& j);

// Dense row-major forms: JSON {"n": n, "rows": [[...], ...]} and plain text
// (dimension line, then one whitespace-separated row per line, full precision).
nlohmann::json matrix_to_json(const SymMat& m);
SymMat matrix_from_json(const nlohmann::json& j);
std::string matrix_to_text(const SymMat& m);
SymMat matrix_from_text(const std::string& text);

// Build artifact: exact targets and weights as "p/q" strings, achieved floating
// diagonal, residual bookkeeping, and the verification residuals when provided.
nlohmann::json build_trace_to_json(const BuildTrace& t, const RealizationReport* rep);

}  // namespace diag
