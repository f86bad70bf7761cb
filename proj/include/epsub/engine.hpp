#pragma once

// The substitution process. One elimination step partitions the system on a
// chosen owner and replaces it by the deduplicated union of the Keep branch
// (the remainder untouched) and one Witness branch per witness (the remainder
// with owner -> witness substituted everywhere). The branch labels of every
// step span the choice tree whose leaves are the substitution sequences; the
// disjunction of the instances of the original system under those sequences
// is the process result, checked by the tautology kernel.

#include "epsub/complexity.hpp"
#include "epsub/taut.hpp"
#include "epsub/translate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epsub {

enum class Strategy { MaximalComplexity, FirstListed, MinDegree };
enum class Mode { Strict, Permissive };
enum class ApplyOrder { Recorded, Reverse };

struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DestroyedError : EngineError {
  FormulaPtr formula;
  std::string branch;
  DestroyedError(FormulaPtr f, std::string branch_label, const std::string& detail);
};

struct SubstitutionStep {
  TermPtr epsilon_term;
  TermPtr replacement;
};
using SubstitutionSequence = std::vector<SubstitutionStep>;

// ---------- single step ----------

struct PartitionResult {
  std::vector<TermPtr> witnesses; // deduplicated, in system order
  SystemE remainder;
};

// Splits off the critical formulas owned by `e` (primary decomposition).
// Throws EngineError when e owns nothing.
PartitionResult partition(const SystemE& system, const TermPtr& e);

struct Branch {
  bool keep = false;
  TermPtr witness;                   // null for the Keep branch
  SystemE system;                    // re-validated members
  std::vector<FormulaPtr> destroyed; // failed re-validation (permissive mode)
};

// Keep branch first, then one branch per witness. In strict mode a formula
// failing re-validation throws DestroyedError; in permissive mode it is
// dropped from the branch system and carried in `destroyed`.
std::vector<Branch> principal_step(const SystemE& system, const TermPtr& e,
                                   Mode mode = Mode::Permissive);

TermPtr select_owner(const SystemE& system, Strategy strategy);

// ---------- traces and loop detection ----------

// Canonical signature: formulas printed with every maximal eps subterm
// replaced by <k>, k assigned in first-occurrence order across the system.
std::string system_signature(const SystemE& system);

struct FormulaStatus {
  FormulaPtr formula;
  bool critical = true;
};

struct BranchRecord {
  std::string label; // "keep" or the printed witness
  SystemMeasure measure;
  bool measure_smaller = false;
  std::vector<FormulaStatus> validation;
};

struct StepRecord {
  int index = 0;
  TermPtr chosen;
  std::vector<TermPtr> witnesses;
  SystemMeasure parent_measure;
  std::vector<BranchRecord> branches;
  SystemE resulting; // deduplicated union of the branch systems
  SystemMeasure resulting_measure;
  bool resulting_measure_smaller = false;
  std::string signature;
};

struct Trace {
  SystemE initial;
  std::string initial_signature;
  std::vector<StepRecord> steps;
};

// True iff some system signature repeats along the run (initial included).
bool detect_loop(const Trace& trace);

// ---------- solving ----------

struct SolveOptions {
  Strategy strategy = Strategy::MaximalComplexity;
  int budget = 100;
  ApplyOrder apply_order = ApplyOrder::Recorded;
  std::optional<Mode> mode; // default: Strict for MaximalComplexity, else Permissive
  unsigned taut_threshold = 20;
  std::size_t leaf_cap = 1u << 20;
};

struct DestroyedRecord {
  int step = 0;
  std::string branch;
  FormulaPtr formula;
};

struct SolveOutcome {
  enum class Status { Solved, Diverged };
  Status status = Status::Solved;
  int steps = 0;
  Trace trace;
  std::optional<int> loop_detected_at;         // step index of the first repeat
  std::vector<std::string> divergence_reasons; // "budget-exhausted", "loop-detected"
  std::vector<DestroyedRecord> destroyed;      // permissive-mode diagnostics

  // populated when Solved
  std::vector<SubstitutionSequence> leaves;
  FormulaPtr disjunction; // null only for an initially empty system
  std::optional<TautResult> verdict;

  bool solved_tautology() const {
    return status == Status::Solved && verdict && verdict->tautology;
  }
};

// Runs eliminations until the system is empty or the budget is spent. A
// detected loop is recorded but does not cut the run short: the growing trace
// is the point of a diverging run. Strict mode additionally enforces that
// every branch keeps all formulas critical and (under MaximalComplexity)
// strictly shrinks the measure.
SolveOutcome solve(const SystemE& system, const SolveOptions& opts = {});

// |E|_S: every formula of E under S, conjoined right-associated in system
// order. Steps apply sequentially in recording order (or reversed).
FormulaPtr instance(const SystemE& system, const SubstitutionSequence& s,
                    ApplyOrder order = ApplyOrder::Recorded);

// Disjunction of the leaf instances, deduplicated up to alpha-equivalence, in
// leaf discovery order.
FormulaPtr assemble_disjunction(const SystemE& system,
                                const std::vector<SubstitutionSequence>& leaves,
                                ApplyOrder order = ApplyOrder::Recorded);

// Verdict on F[t1] | ... | F[tn].
TautResult herbrand_check(const Matrix& m, const std::vector<TermPtr>& witnesses,
                          unsigned taut_threshold = 20);

std::string to_string(Strategy s);
std::string to_string(Mode m);
std::string to_string(ApplyOrder o);

} // namespace epsub
