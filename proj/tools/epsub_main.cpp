// Command-line surface for the epsilon substitution toolkit.
//
// Exit codes: 0 solved and verified tautology (or command succeeded),
// 2 diverged, 3 solved but verification failed, 1 usage/parse/validation.

#include "epsub/demos.hpp"
#include "epsub/engine.hpp"
#include "epsub/parse.hpp"
#include "epsub/print.hpp"
#include "epsub/second_order.hpp"
#include "epsub/trace.hpp"
#include "epsub/translate.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace epsub;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitNotVerified = 3;

bool ansi_enabled() {
  const char* v = std::getenv("EPSUB_COLOR");
  return v && std::string(v) == "1";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_warnings(const std::vector<Warning>& warnings) {
  for (const auto& w : warnings)
    std::cerr << "warning: " << w.message << " (line " << w.pos.line << ", column " << w.pos.col
              << ")\n";
}

void emit_trace(const SolveOutcome& outcome, const RunConfig& config,
                const std::string& input_text) {
  if (config.trace_format == "json") {
    auto doc = trace_document(outcome, config, input_text);
    if (config.trace_out) {
      std::ofstream out(*config.trace_out);
      if (!out) throw std::runtime_error("cannot write trace to " + *config.trace_out);
      out << doc.dump(2) << "\n";
    } else {
      std::cout << doc.dump(2) << "\n";
    }
  } else {
    if (config.trace_out) {
      std::ofstream out(*config.trace_out);
      if (!out) throw std::runtime_error("cannot write trace to " + *config.trace_out);
      out << trace_text(outcome);
    } else {
      std::cout << trace_text(outcome);
    }
  }
}

int run_solve_on(const std::string& source, const RunConfig& config) {
  auto file = parse_system_file(source);
  print_warnings(file.warnings);
  SystemE system = build_system(file.formulas);
  SolveOutcome outcome = solve(system, config.solve_options());
  emit_trace(outcome, config, source);
  std::cout << result_summary(outcome, ansi_enabled());
  if (outcome.status == SolveOutcome::Status::Diverged) return kExitDiverged;
  return outcome.verdict && outcome.verdict->tautology ? kExitOk : kExitNotVerified;
}

int cmd_solve(const std::string& path, const RunConfig& config) {
  return run_solve_on(read_file(path), config);
}

int cmd_translate(const std::string& path) {
  ParseContext ctx;
  auto f = parse_formula_file(read_file(path), &ctx);
  print_warnings(ctx.warnings);
  std::cout << to_string(epsilon_translate(f)) << "\n";
  return kExitOk;
}

int cmd_parse(const std::string& path) {
  std::string text = read_file(path);
  if (text.find("system") != std::string::npos && text.find('{') != std::string::npos) {
    auto file = parse_system_file(text);
    print_warnings(file.warnings);
    for (const auto& f : file.formulas) std::cout << to_string(f) << "\n";
    return kExitOk;
  }
  ParseContext ctx;
  try {
    auto f = parse_formula_file(text, &ctx);
    print_warnings(ctx.warnings);
    std::cout << to_string(f) << "\n";
    return kExitOk;
  } catch (const ParseError&) {
    ParseContext tctx;
    auto t = parse_term(text, &tctx);
    print_warnings(tctx.warnings);
    std::cout << to_string(t) << "\n";
    return kExitOk;
  }
}

int cmd_verify(const std::string& path, unsigned taut_threshold) {
  ParseContext ctx;
  auto f = parse_formula_file(read_file(path), &ctx);
  print_warnings(ctx.warnings);
  auto r = is_tautology(f, taut_threshold);
  if (r.tautology) {
    std::cout << "tautology\n";
    return kExitOk;
  }
  std::cout << "countermodel:\n";
  for (const auto& [k, v] : r.countermodel)
    std::cout << "  " << k << " = " << (v ? "true" : "false") << "\n";
  return kExitNotVerified;
}

void print_so_report(const demos::SoStepDemo& demo) {
  std::cout << "system:\n";
  for (const auto& m : demo.system.members) std::cout << "  " << so::to_string(m.formula) << "\n";
  std::cout << "eliminated: "
            << (demo.eliminated.index() == 0 ? so::to_string(std::get<0>(demo.eliminated))
                                             : so::to_string(std::get<1>(demo.eliminated)))
            << "\n";
  std::cout << "measure: multiset of (rank, degree) over owners, second-order epsilon binders"
               " counted like epsilon binders; parent "
            << to_string(demo.report.parent) << "\n";
  for (std::size_t i = 0; i < demo.branches.size(); ++i) {
    const auto& b = demo.branches[i];
    const auto& r = demo.report.branches[i];
    std::cout << "branch " << b.label << ":\n";
    for (const auto& m : b.system.members) std::cout << "    " << so::to_string(m.formula) << "\n";
    std::cout << "    measure " << to_string(r.measure)
              << (r.smaller ? " -- smaller than the parent\n"
                            : " -- NOT smaller than the parent\n");
  }
  if (demo.report.any_not_smaller)
    std::cout << "at least one branch fails to shrink: the single step stays available, but no"
                 " termination argument survives it\n";
}

int cmd_demo(const std::string& name, RunConfig config, bool strategy_given, bool iterate_so) {
  if (name == "identity") {
    std::cout << "# identity: " << demos::identity_source();
    return run_solve_on(demos::identity_source(), config);
  }
  if (name == "ackermann-loop") {
    if (strategy_given) return run_solve_on(demos::ackermann_loop_source(), config);

    std::cout << "== maximal complexity ==\n";
    RunConfig max = config;
    max.strategy = Strategy::MaximalComplexity;
    int a = run_solve_on(demos::ackermann_loop_source(), max);

    std::cout << "\n== first-listed (the naive order) ==\n";
    RunConfig naive = config;
    naive.strategy = Strategy::FirstListed;
    naive.budget = 20;
    int b = run_solve_on(demos::ackermann_loop_source(), naive);

    std::cout << "\nmaximal: " << (a == kExitOk ? "solved, tautology" : "unexpected outcome")
              << "; first-listed: " << (b == kExitDiverged ? "diverged (loop)" : "unexpected outcome")
              << "\n";
    return (a == kExitOk && b == kExitDiverged) ? kExitOk : kExitNotVerified;
  }
  if (name == "so-step") {
    auto demo = demos::so_step_demo();
    std::cout << "single second-order principal step (the witness below is a constructed"
                 " instance exhibiting the growth)\n";
    print_so_report(demo);
    if (iterate_so) {
      auto again = demos::so_step_again(demo);
      if (again) {
        std::cout << "\n-- one more step (explicitly requested; nothing here claims"
                     " termination) --\n";
        print_so_report(*again);
      } else {
        std::cout << "\nno further step applies\n";
      }
    }
    return demo.report.any_not_smaller ? kExitOk : kExitNotVerified;
  }
  std::cerr << "unknown demo '" << name << "'; available: ackermann-loop, so-step, identity\n";
  return kExitUsage;
}

void add_run_flags(CLI::App* cmd, RunConfig& config, bool* strategy_given = nullptr) {
  auto* s = cmd->add_option_function<std::string>(
      "--strategy",
      [&config](const std::string& v) {
        config.strategy = v == "maximal"        ? Strategy::MaximalComplexity
                          : v == "first-listed" ? Strategy::FirstListed
                                                : Strategy::MinDegree;
      },
      "owner selection: maximal | first-listed | min-degree");
  s->check(CLI::IsMember({"maximal", "first-listed", "min-degree"}));
  if (strategy_given) {
    s->each([strategy_given](const std::string&) { *strategy_given = true; });
  }
  cmd->add_option("--budget", config.budget, "maximum number of eliminations")
      ->check(CLI::PositiveNumber);
  cmd->add_option_function<std::string>(
         "--apply-order",
         [&config](const std::string& v) {
           config.apply_order = v == "reverse" ? ApplyOrder::Reverse : ApplyOrder::Recorded;
         },
         "substitution application order: recorded | reverse")
      ->check(CLI::IsMember({"recorded", "reverse"}));
  cmd->add_option_function<std::string>(
         "--mode",
         [&config](const std::string& v) {
           config.mode = v == "strict" ? Mode::Strict : Mode::Permissive;
         },
         "destroyed-formula handling: strict | permissive")
      ->check(CLI::IsMember({"strict", "permissive"}));
  cmd->add_option("--trace-format", config.trace_format, "trace format: text | json")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option_function<std::string>(
      "--trace-out", [&config](const std::string& v) { config.trace_out = v; },
      "write the trace to a file instead of standard output");
  cmd->add_option("--taut-threshold", config.taut_threshold,
                  "truth-table cutoff for the tautology kernel");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"epsilon substitution method for predicate logic"};
  app.set_version_flag("--version", epsub::tool_version());
  app.require_subcommand(1);

  std::string input;
  RunConfig solve_config;
  auto* solve_cmd = app.add_subcommand("solve", "run the substitution process on a system file");
  solve_cmd->add_option("input", input, "system file")->required();
  add_run_flags(solve_cmd, solve_config);

  std::string translate_input;
  auto* translate_cmd =
      app.add_subcommand("translate", "epsilon-translate the quantified formula in a file");
  translate_cmd->add_option("input", translate_input, "formula file")->required();

  std::string parse_input;
  auto* parse_cmd = app.add_subcommand("parse", "parse a file and print it back");
  parse_cmd->add_option("input", parse_input, "formula, term or system file")->required();

  std::string verify_input;
  unsigned verify_threshold = 20;
  auto* verify_cmd = app.add_subcommand("verify", "decide whether a formula is a tautology");
  verify_cmd->add_option("input", verify_input, "formula file")->required();
  verify_cmd->add_option("--taut-threshold", verify_threshold,
                         "truth-table cutoff for the tautology kernel");

  std::string demo_name;
  RunConfig demo_config;
  bool demo_strategy_given = false;
  bool iterate_so = false;
  auto* demo_cmd = app.add_subcommand("demo", "built-in scenarios");
  demo_cmd->add_option("name", demo_name, "ackermann-loop | so-step | identity")->required();
  add_run_flags(demo_cmd, demo_config, &demo_strategy_given);
  demo_cmd->add_flag("--i-know-this-is-open", iterate_so,
                     "after the single second-order step, apply one more");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(input, solve_config);
    if (*translate_cmd) return cmd_translate(translate_input);
    if (*parse_cmd) return cmd_parse(parse_input);
    if (*verify_cmd) return cmd_verify(verify_input, verify_threshold);
    if (*demo_cmd) return cmd_demo(demo_name, demo_config, demo_strategy_given, iterate_so);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotCriticalError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DestroyedError& e) {
    std::cerr << "destroyed critical formula (strict mode): " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
