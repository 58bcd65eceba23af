#pragma once

#include <array>

#include "diag/kernel.hpp"

namespace diag {

enum class Outcome { Diagonal, NotDiagonal, KernelInconclusive, PrecisionUnknown };
const char* outcome_name(Outcome o);

struct ConditionStatus {
  Tri status = Tri::Unknown;
  std::string witness;  // set when status == False; re-checkable by exact arithmetic
};

// The six necessary conditions, in order:
//   1 partial-sum dominance on positive parts    2 same on negative parts
//   3 d+ summable implies sigma- >= sigma+       4 d- summable implies sigma+ >= sigma-
//   5 sigma+ = 0 implies zero & nonnegative counts dominate
//   6 sigma- = 0 implies zero & nonpositive counts dominate
struct NecessityTrace {
  std::array<ConditionStatus, 6> p;
  ExcessReport excess;
};

NecessityTrace check_necessity(const ExtendedSequence& lambda, const ExtendedSequence& d,
                               const Precision& prec);

struct SplitOutcome {
  Splitting split;
  KernelResult pos, neg;
};

struct Verdict {
  Outcome outcome = Outcome::PrecisionUnknown;
  NecessityTrace trace;
  std::vector<SplitOutcome> splittings_examined;
  int precision_level = 1;  // highest level reached
  std::string note;
};

// Full decision: necessity, then strict-excess sufficiency, then the zero-excess
// branch over all zero splittings. Escalates the work bounds internally before
// reporting PrecisionUnknown.
Verdict decide(const ExtendedSequence& lambda, const ExtendedSequence& d,
               const Precision& prec);

struct ExplainReport {
  Verdict verdict;
  std::string text;  // human-readable rendering
  std::string json;  // stable machine-readable rendering
};

ExplainReport explain(const ExtendedSequence& lambda, const ExtendedSequence& d,
                      const Precision& prec);

}  // namespace diag
