// Acceptance suite. Each criterion prints exactly one PASS/FAIL line; the
// process exits nonzero if any criterion fails. Library-level checks run
// against the engine directly; the exit-code checks drive the CLI binary
// named by the EPSUB_CLI environment variable.

#include "epsub/demos.hpp"
#include "epsub/engine.hpp"
#include "epsub/parse.hpp"
#include "epsub/print.hpp"
#include "epsub/second_order.hpp"
#include "epsub/translate.hpp"

#include "support/gen.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace epsub;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  if (!ok) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

TermPtr chain(unsigned n) {
  test::Gen g(0);
  return g.chain(n);
}

std::vector<FormulaPtr> nth_step_form(unsigned n) {
  return {implies(atom("P", {chain(n + 2), chain(n)}), atom("P", {chain(n + 1), chain(n)})),
          implies(atom("P", {chain(n + 3), chain(n + 1)}), atom("P", {chain(n + 2), chain(n + 1)}))};
}

bool system_matches(const SystemE& sys, const std::vector<FormulaPtr>& want) {
  if (sys.size() != want.size()) return false;
  std::vector<bool> used(want.size(), false);
  for (const auto& m : sys.members) {
    bool hit = false;
    for (std::size_t i = 0; i < want.size(); ++i)
      if (!used[i] && alpha_eq(m.cf.formula, want[i])) {
        used[i] = true;
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("EPSUB_CLI");
  if (!cli) return -1;
  std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// ---------- criteria ----------

void loop_reproduction() {
  Timer t;
  SolveOptions opts;
  opts.strategy = Strategy::FirstListed;
  opts.budget = 20;
  auto out = solve(demos::ackermann_loop_system(), opts);

  bool ok = out.status == SolveOutcome::Status::Diverged;
  std::string detail;
  for (unsigned n = 1; n <= 5 && ok; ++n) {
    if (out.trace.steps.size() <= n || !system_matches(out.trace.steps[n].resulting, nth_step_form(n))) {
      ok = false;
      detail = "step " + std::to_string(n) + " system mismatch";
    }
  }
  if (ok && (!out.loop_detected_at || *out.loop_detected_at > 5)) {
    ok = false;
    detail = "loop detector did not fire by step 5";
  }
  int rc = run_cli("demo ackermann-loop --strategy first-listed --budget 20");
  if (ok && rc != 2) {
    ok = false;
    detail = "CLI exit code " + std::to_string(rc) + ", expected 2";
  }
  if (ok)
    detail = "steps 1..5 match the closed form, loop detected at step " +
             std::to_string(*out.loop_detected_at) + ", CLI exit 2 (" +
             std::to_string(t.seconds()) + "s)";
  report("loop-reproduction", ok, detail);
}

void maximal_solve() {
  Timer t;
  SolveOptions opts;
  opts.strategy = Strategy::MaximalComplexity;
  opts.budget = 100;
  auto out = solve(demos::ackermann_loop_system(), opts);

  bool ok = out.status == SolveOutcome::Status::Solved;
  std::string detail = ok ? "" : "did not terminate";
  for (const auto& rec : out.trace.steps) {
    if (!rec.resulting_measure_smaller) { ok = false; detail = "union measure did not shrink"; }
    for (const auto& br : rec.branches) {
      if (!br.measure_smaller) { ok = false; detail = "a branch measure did not shrink"; }
      for (const auto& v : br.validation)
        if (!v.critical) { ok = false; detail = "a child formula failed recognition"; }
    }
  }
  if (ok && !(out.verdict && out.verdict->tautology)) {
    ok = false;
    detail = "kernel verdict is not Tautology";
  }
  if (ok && !test::tt_tautology(out.disjunction)) {
    ok = false;
    detail = "independent truth-table oracle disagrees";
  }
  int rc = run_cli("demo ackermann-loop --strategy maximal --budget 100");
  if (ok && rc != 0) {
    ok = false;
    detail = "CLI exit code " + std::to_string(rc) + ", expected 0";
  }
  if (ok)
    detail = "terminates in " + std::to_string(out.steps) +
             " steps, every measure shrinks, every child critical, kernel and truth table both"
             " say tautology (" + std::to_string(t.seconds()) + "s)";
  report("maximal-solve", ok, detail);
}

void corpus_rate(const std::string& corpus_dir) {
  Timer t;
  std::vector<std::pair<std::string, SystemE>> systems;
  std::string detail;
  bool ok = true;

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir))
    if (entry.path().extension() == ".eps") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      systems.emplace_back(p.filename().string(), build_system(parse_system_file(ss.str()).formulas));
    } catch (const std::exception& e) {
      ok = false;
      detail = p.filename().string() + " failed to build: " + e.what();
    }
  }
  std::size_t curated = systems.size();
  if (curated < 30) {
    ok = false;
    detail = "only " + std::to_string(curated) + " curated systems";
  }

  test::Gen g(424242);
  std::size_t generated = 0;
  while (generated < 200) {
    SystemE E;
    try {
      E = build_system(g.system_formulas());
    } catch (const NotCriticalError&) {
      continue;
    }
    if (E.empty()) continue;
    systems.emplace_back("random-" + std::to_string(generated), std::move(E));
    ++generated;
  }

  std::size_t solved = 0, tautologies = 0;
  for (const auto& [name, E] : systems) {
    if (!ok) break;
    SolveOptions opts;
    opts.strategy = Strategy::MaximalComplexity;
    opts.budget = 100;
    try {
      auto out = solve(E, opts); // strict: destruction or non-decrease throws
      if (out.status != SolveOutcome::Status::Solved) {
        ok = false;
        detail = name + " did not terminate within budget";
        break;
      }
      ++solved;
      if (out.verdict && out.verdict->tautology) ++tautologies;
      else {
        ok = false;
        detail = name + " solved but the disjunction is not a tautology";
        break;
      }
    } catch (const std::exception& e) {
      ok = false;
      detail = name + ": " + e.what();
      break;
    }
  }
  if (ok)
    detail = std::to_string(curated) + " curated + " + std::to_string(generated) +
             " generated systems, " + std::to_string(tautologies) + "/" + std::to_string(solved) +
             " terminating runs verified Tautology (" + std::to_string(t.seconds()) + "s)";
  report("corpus-tautology-rate", ok, detail);
}

void destruction_exhibit(const std::string& corpus_dir) {
  Timer t;
  std::size_t exhibits = 0;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir))
    if (entry.path().extension() == ".eps") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::string first;
  for (const auto& p : files) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    SystemE E;
    try {
      E = build_system(parse_system_file(ss.str()).formulas);
    } catch (const std::exception&) {
      continue;
    }
    for (Strategy s : {Strategy::FirstListed, Strategy::MinDegree}) {
      SolveOptions opts;
      opts.strategy = s;
      opts.mode = Mode::Permissive;
      opts.budget = 20;
      try {
        auto out = solve(E, opts);
        bool genuine = false;
        for (const auto& d : out.destroyed)
          if (recognize_critical(d.formula).empty()) genuine = true;
        if (genuine) {
          ++exhibits;
          if (first.empty()) first = p.filename().string() + " under " + to_string(s);
          break;
        }
      } catch (const std::exception&) {
      }
    }
  }
  bool ok = exhibits >= 1;
  report("destruction-exhibit", ok,
         ok ? std::to_string(exhibits) + " corpus systems destroy a critical formula under a"
              " non-maximal-rank strategy, surfaced as diagnostics (first: " + first + ") (" +
              std::to_string(t.seconds()) + "s)"
            : "no corpus system exhibits destruction");
}

void kernel_oracle() {
  Timer t;
  test::Gen g(90210);
  bool ok = true;
  std::string detail;
  int countermodels = 0;
  for (int i = 0; i < 1000 && ok; ++i) {
    auto f = g.prop_formula(5, 12);
    auto table = is_tautology(f, 20);
    auto search = is_tautology(f, 0);
    bool oracle = test::tt_tautology(f);
    if (table.tautology != oracle || search.tautology != oracle) {
      ok = false;
      detail = "verdict mismatch on formula " + to_string(f);
      break;
    }
    for (const auto* r : {&table, &search}) {
      if (!r->tautology) {
        ++countermodels;
        if (evaluate(f, r->countermodel)) {
          ok = false;
          detail = "countermodel does not falsify " + to_string(f);
          break;
        }
      }
    }
  }
  if (ok)
    detail = "1000 formulas: backtracking == truth table == oracle; " +
             std::to_string(countermodels) + " countermodels all evaluate false (" +
             std::to_string(t.seconds()) + "s)";
  report("kernel-oracle-equivalence", ok, detail);
}

void round_trip() {
  Timer t;
  test::Gen g(31337);
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 1000 && ok; ++i) {
    if (i % 2 == 0) {
      auto f = g.formula(4);
      if (!alpha_eq(parse_formula(to_string(f)), f)) {
        ok = false;
        detail = "formula round trip failed: " + to_string(f);
      }
    } else {
      auto term = g.term(4);
      if (!alpha_eq(parse_term(to_string(term)), term)) {
        ok = false;
        detail = "term round trip failed: " + to_string(term);
      }
    }
  }
  if (ok) detail = "1000 random trees reparse alpha-equivalently (" + std::to_string(t.seconds()) + "s)";
  report("round-trip", ok, detail);
}

void so_step() {
  Timer t;
  bool ok = true;
  std::string detail;

  auto demo = demos::so_step_demo();
  if (!demo.report.any_not_smaller) {
    ok = false;
    detail = "no branch with a non-decreasing measure";
  }

  // embedded fragment agreement on 100 random systems
  test::Gen g(161803);
  int compared = 0;
  while (ok && compared < 100) {
    SystemE E;
    try {
      E = build_system(g.system_formulas());
    } catch (const NotCriticalError&) {
      continue;
    }
    if (E.empty()) continue;
    ++compared;
    so::SOSystem S;
    for (const auto& m : E.members)
      S.members.push_back(so::SOCriticalFormula{
          so::embed(m.cf.formula),
          so::IndOwner{so::embed(m.cf.epsilon_term), so::embed(m.cf.witness)}});
    auto e = select_maximal(E);
    auto fo = principal_step(E, e, Mode::Permissive);
    auto sob = so::so_principal_step(S, so::SOOwnerRef{so::embed(e)}, Mode::Permissive);
    if (fo.size() != sob.size()) {
      ok = false;
      detail = "branch count mismatch on an embedded system";
      break;
    }
    for (std::size_t b = 0; b < fo.size() && ok; ++b) {
      if (fo[b].system.size() != sob[b].system.size()) {
        ok = false;
        detail = "branch system size mismatch on an embedded system";
        break;
      }
      for (std::size_t k = 0; k < fo[b].system.size(); ++k)
        if (!so::alpha_eq(so::embed(fo[b].system.members[k].cf.formula),
                          sob[b].system.members[k].formula)) {
          ok = false;
          detail = "branch formula mismatch on an embedded system";
          break;
        }
    }
  }

  int rc = run_cli("demo so-step");
  if (ok && rc != 0) {
    ok = false;
    detail = "CLI exit code " + std::to_string(rc) + ", expected 0";
  }
  if (ok)
    detail = "one step performed, witness branch flagged non-decreasing, first-order agreement"
             " on " + std::to_string(compared) + " embedded systems, CLI exit 0 (" +
             std::to_string(t.seconds()) + "s)";
  report("second-order-step", ok, detail);
}

} // namespace

int main(int argc, char** argv) {
  std::string corpus_dir = argc > 1 ? argv[1] : "corpus";
  loop_reproduction();
  maximal_solve();
  corpus_rate(corpus_dir);
  destruction_exhibit(corpus_dir);
  kernel_oracle();
  round_trip();
  so_step();
  return failures == 0 ? 0 : 1;
}
