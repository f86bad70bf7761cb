#include "epsub/engine.hpp"

#include "epsub/print.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace epsub {

DestroyedError::DestroyedError(FormulaPtr f, std::string branch_label, const std::string& detail)
    : EngineError("critical formula destroyed on branch " + branch_label + ": " + detail),
      formula(std::move(f)),
      branch(std::move(branch_label)) {}

// ---------- single step ----------

PartitionResult partition(const SystemE& system, const TermPtr& e) {
  PartitionResult out;
  bool owns = false;
  for (const auto& m : system.members) {
    if (alpha_eq(m.cf.epsilon_term, e)) {
      owns = true;
      bool seen = false;
      for (const auto& w : out.witnesses)
        if (alpha_eq(w, m.cf.witness)) { seen = true; break; }
      if (!seen) out.witnesses.push_back(m.cf.witness);
    } else {
      out.remainder.members.push_back(m);
    }
  }
  if (!owns)
    throw EngineError("partition: " + to_string(e) + " owns no critical formula in the system");
  return out;
}

std::vector<Branch> principal_step(const SystemE& system, const TermPtr& e, Mode mode) {
  PartitionResult part = partition(system, e);
  std::vector<Branch> out;

  Branch keep;
  keep.keep = true;
  keep.system = part.remainder;
  out.push_back(std::move(keep));

  for (const auto& w : part.witnesses) {
    Branch b;
    b.witness = w;
    for (const auto& m : part.remainder.members) {
      FormulaPtr nf = substitute(m.cf.formula, e, w);
      Decomposition d = recognize_critical(nf);
      if (d.empty()) {
        if (mode == Mode::Strict)
          throw DestroyedError(nf, to_string(w), to_string(nf));
        b.destroyed.push_back(nf);
        continue;
      }
      CriticalFormula cf{nf, d.front().epsilon_term, d.front().witness, d.front().mat};
      push_dedup(b.system, SystemE::Member{std::move(cf), std::move(d)});
    }
    out.push_back(std::move(b));
  }
  return out;
}

TermPtr select_owner(const SystemE& system, Strategy strategy) {
  if (system.empty()) throw EngineError("select_owner: empty system");
  switch (strategy) {
    case Strategy::MaximalComplexity:
      return select_maximal(system);
    case Strategy::FirstListed:
      return system.members.front().cf.epsilon_term;
    case Strategy::MinDegree: {
      TermPtr best;
      Complexity best_c;
      std::string best_str;
      for (const auto& m : system.members) {
        const TermPtr& e = m.cf.epsilon_term;
        Complexity c{rank(e), degree(e)};
        std::string s = canonical_str(e);
        // minimal degree, then minimal rank, then print order
        bool better = !best || c.degree < best_c.degree ||
                      (c.degree == best_c.degree &&
                       (c.rank < best_c.rank || (c.rank == best_c.rank && s < best_str)));
        if (better) {
          best = e;
          best_c = c;
          best_str = std::move(s);
        }
      }
      return best;
    }
  }
  throw EngineError("select_owner: bad strategy");
}

// ---------- signatures ----------

namespace {

struct SigPrinter {
  std::vector<TermPtr> classes; // first-occurrence order, alpha-distinct

  unsigned class_of(const TermPtr& e) {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (alpha_eq(classes[i], e)) return static_cast<unsigned>(i + 1);
    classes.push_back(e);
    return static_cast<unsigned>(classes.size());
  }

  void term(std::ostringstream& os, const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Var: os << t->name; return;
      case Term::Kind::Bound: os << "$" << t->index; return;
      case Term::Kind::Fun:
        os << t->name;
        if (!t->args.empty()) {
          os << "(";
          for (std::size_t i = 0; i < t->args.size(); ++i) {
            if (i) os << ",";
            term(os, t->args[i]);
          }
          os << ")";
        }
        return;
      case Term::Kind::Eps:
        os << "<" << class_of(t) << ">"; // opaque
        return;
    }
  }

  void formula(std::ostringstream& os, const FormulaPtr& f) {
    switch (f->kind) {
      case Formula::Kind::Atom:
        os << f->name;
        if (!f->args.empty()) {
          os << "(";
          for (std::size_t i = 0; i < f->args.size(); ++i) {
            if (i) os << ",";
            term(os, f->args[i]);
          }
          os << ")";
        }
        return;
      case Formula::Kind::Not:
        os << "~";
        formula(os, f->lhs);
        return;
      case Formula::Kind::And:
      case Formula::Kind::Or:
      case Formula::Kind::Implies:
        os << "(";
        formula(os, f->lhs);
        os << (f->kind == Formula::Kind::And ? " & " : f->kind == Formula::Kind::Or ? " | " : " -> ");
        formula(os, f->rhs);
        os << ")";
        return;
      case Formula::Kind::Exists:
      case Formula::Kind::Forall:
        // systems are quantifier-free; placeholder for diagnostics
        os << (f->kind == Formula::Kind::Exists ? "exists. " : "forall. ");
        formula(os, f->body);
        return;
    }
  }
};

} // namespace

std::string system_signature(const SystemE& system) {
  SigPrinter p;
  std::ostringstream os;
  for (std::size_t i = 0; i < system.members.size(); ++i) {
    if (i) os << " ; ";
    p.formula(os, system.members[i].cf.formula);
  }
  return os.str();
}

bool detect_loop(const Trace& trace) {
  std::vector<std::string> seen;
  seen.push_back(trace.initial_signature);
  for (const auto& s : trace.steps) {
    if (std::find(seen.begin(), seen.end(), s.signature) != seen.end()) return true;
    seen.push_back(s.signature);
  }
  return false;
}

// ---------- instances and disjunctions ----------

FormulaPtr instance(const SystemE& system, const SubstitutionSequence& s, ApplyOrder order) {
  if (system.empty()) throw EngineError("instance: empty system");
  SubstitutionSequence steps = s;
  if (order == ApplyOrder::Reverse) std::reverse(steps.begin(), steps.end());
  std::vector<FormulaPtr> parts;
  parts.reserve(system.size());
  for (const auto& m : system.members) {
    FormulaPtr f = m.cf.formula;
    for (const auto& st : steps) f = substitute(f, st.epsilon_term, st.replacement);
    parts.push_back(f);
  }
  FormulaPtr out = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) out = conj(parts[i], out);
  return out;
}

FormulaPtr assemble_disjunction(const SystemE& system,
                                const std::vector<SubstitutionSequence>& leaves,
                                ApplyOrder order) {
  if (leaves.empty()) throw EngineError("assemble_disjunction: no leaves");
  std::vector<FormulaPtr> parts;
  for (const auto& s : leaves) {
    FormulaPtr inst = instance(system, s, order);
    bool seen = false;
    for (const auto& p : parts)
      if (alpha_eq(p, inst)) { seen = true; break; }
    if (!seen) parts.push_back(inst);
  }
  FormulaPtr out = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) out = disj(parts[i], out);
  return out;
}

// ---------- solve ----------

SolveOutcome solve(const SystemE& system, const SolveOptions& opts) {
  if (opts.budget < 1) throw EngineError("solve: budget must be at least 1");
  Mode mode = opts.mode.value_or(opts.strategy == Strategy::MaximalComplexity ? Mode::Strict
                                                                              : Mode::Permissive);
  SolveOutcome out;
  out.trace.initial = system;
  out.trace.initial_signature = system_signature(system);

  std::vector<std::string> seen_sigs{out.trace.initial_signature};
  struct Choice {
    TermPtr chosen;
    std::vector<TermPtr> witnesses;
  };
  std::vector<Choice> choices;

  SystemE current = system;
  int steps = 0;
  while (!current.empty() && steps < opts.budget) {
    TermPtr e = select_owner(current, opts.strategy);
    PartitionResult part = partition(current, e);
    std::vector<Branch> branches = principal_step(current, e, mode);

    StepRecord rec;
    rec.index = steps;
    rec.chosen = e;
    rec.witnesses = part.witnesses;
    rec.parent_measure = measure(current);

    SystemE unioned;
    for (const auto& b : branches) {
      BranchRecord br;
      br.label = b.keep ? "keep" : to_string(b.witness);
      br.measure = measure(b.system);
      br.measure_smaller = measure_less(br.measure, rec.parent_measure);
      for (const auto& m : b.system.members)
        br.validation.push_back(FormulaStatus{m.cf.formula, true});
      for (const auto& f : b.destroyed) {
        br.validation.push_back(FormulaStatus{f, false});
        out.destroyed.push_back(DestroyedRecord{steps, br.label, f});
      }
      rec.branches.push_back(std::move(br));
      for (const auto& m : b.system.members) push_dedup(unioned, m);
    }

    rec.resulting = unioned;
    rec.resulting_measure = measure(unioned);
    rec.resulting_measure_smaller = measure_less(rec.resulting_measure, rec.parent_measure);
    rec.signature = system_signature(unioned);

    if (opts.strategy == Strategy::MaximalComplexity && mode == Mode::Strict) {
      for (const auto& br : rec.branches)
        if (!br.measure_smaller)
          throw EngineError("measure did not decrease on branch " + br.label + " at step " +
                            std::to_string(steps));
      if (!rec.resulting_measure_smaller)
        throw EngineError("measure did not decrease across step " + std::to_string(steps));
    }

    if (!out.loop_detected_at &&
        std::find(seen_sigs.begin(), seen_sigs.end(), rec.signature) != seen_sigs.end())
      out.loop_detected_at = steps;
    seen_sigs.push_back(rec.signature);

    out.trace.steps.push_back(std::move(rec));
    choices.push_back(Choice{e, part.witnesses});
    current = std::move(unioned);
    ++steps;
  }
  out.steps = steps;

  if (!current.empty()) {
    out.status = SolveOutcome::Status::Diverged;
    out.divergence_reasons.push_back("budget-exhausted");
    if (out.loop_detected_at) out.divergence_reasons.push_back("loop-detected");
    return out;
  }

  out.status = SolveOutcome::Status::Solved;

  // Leaves: one label per step, Keep or one of its witnesses, in depth-first
  // (odometer) order with Keep explored first.
  std::size_t total = 1;
  for (const auto& c : choices) {
    std::size_t k = c.witnesses.size() + 1;
    if (total > opts.leaf_cap / k)
      throw EngineError("leaf enumeration exceeds cap (" + std::to_string(opts.leaf_cap) + ")");
    total *= k;
  }
  std::vector<std::size_t> pick(choices.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    SubstitutionSequence s;
    for (std::size_t i = 0; i < choices.size(); ++i)
      if (pick[i] > 0)
        s.push_back(SubstitutionStep{choices[i].chosen, choices[i].witnesses[pick[i] - 1]});
    out.leaves.push_back(std::move(s));
    for (std::size_t i = choices.size(); i-- > 0;) {
      if (++pick[i] <= choices[i].witnesses.size()) break;
      pick[i] = 0;
    }
  }

  if (!system.empty()) {
    out.disjunction = assemble_disjunction(system, out.leaves, opts.apply_order);
    out.verdict = is_tautology(out.disjunction, opts.taut_threshold);
  } else {
    out.verdict = TautResult{true, {}};
  }
  return out;
}

// ---------- herbrand comparison ----------

TautResult herbrand_check(const Matrix& m, const std::vector<TermPtr>& witnesses,
                          unsigned taut_threshold) {
  if (!quantifier_free(m.body))
    throw EngineError("herbrand_check: matrix body contains a quantifier");
  if (witnesses.empty()) throw EngineError("herbrand_check: empty witness list");
  FormulaPtr out = m.apply(witnesses.back());
  for (std::size_t i = witnesses.size() - 1; i-- > 0;) out = disj(m.apply(witnesses[i]), out);
  return is_tautology(out, taut_threshold);
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::MaximalComplexity: return "maximal";
    case Strategy::FirstListed: return "first-listed";
    case Strategy::MinDegree: return "min-degree";
  }
  return "?";
}

std::string to_string(Mode m) { return m == Mode::Strict ? "strict" : "permissive"; }

std::string to_string(ApplyOrder o) { return o == ApplyOrder::Recorded ? "recorded" : "reverse"; }

} // namespace epsub
