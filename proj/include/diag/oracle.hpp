#pragma once

#include <cstdint>
#include <string>

#include "diag/sequence.hpp"

namespace diag {

// Randomized property suites shared by the CLI oracle subcommand and the test
// binaries. Every suite is deterministic for a fixed seed.
struct OracleReport {
  long trials = 0;
  long violations = 0;
  double max_residual = 0.0;  // suites with a numeric residual report the worst seen
  std::string note;           // description of the first violation
  bool ok() const { return violations == 0; }
};

// Random finitely supported nonnegative pairs: partial-sum dominance and the
// step-functional criterion must agree, and the small-threshold limit of the step
// functional must equal the eventual partial-sum gap, exactly.
OracleReport oracle_lr_equivalence(std::uint64_t seed, long trials, const Precision& prec);

// Random majorization pairs in dimension `dim` (target generated from the eigenvalue
// list by random averaging moves): build the realization, then re-diagonalize and
// compare spectrum and diagonal within tol.
OracleReport oracle_schur_horn_roundtrip(std::uint64_t seed, int dim, long trials,
                                         double tol);

// Runs the named transformer on random valid instances; the transformers verify their
// own postconditions exactly, so any throw is a violation.
// kind: convmove | one_neg | midseq | fis | fiz | exequal | all.
OracleReport oracle_transformer_postconditions(std::uint64_t seed, const std::string& kind,
                                               long trials, const Precision& prec);

// Metamorphic checks on random signed pairs: the decision is invariant under negating
// both sequences (which swaps the two sign classes), and raising the precision level
// never flips a definite verdict.
OracleReport oracle_decision_metamorphic(std::uint64_t seed, long trials,
                                         const Precision& prec);

}  // namespace diag
