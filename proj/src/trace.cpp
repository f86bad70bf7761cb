#include "epsub/trace.hpp"

#include "epsub/print.hpp"

#include <chrono>
#include <cstdint>
#include <sstream>

namespace epsub {

namespace {

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

nlohmann::ordered_json measure_json(const SystemMeasure& m) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : m.entries) arr.push_back({c.rank, c.degree});
  return arr;
}

nlohmann::ordered_json system_json(const SystemE& sys) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& mem : sys.members) arr.push_back(to_string(mem.cf.formula));
  return arr;
}

const char* status_str(SolveOutcome::Status s) {
  return s == SolveOutcome::Status::Solved ? "solved" : "diverged";
}

} // namespace

std::string tool_version() {
#ifdef EPSUB_VERSION
  return EPSUB_VERSION;
#else
  return "0.0.0";
#endif
}

std::string input_digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << h;
  return os.str();
}

nlohmann::ordered_json trace_document(const SolveOutcome& out, const RunConfig& config,
                                      const std::string& input_text) {
  nlohmann::ordered_json doc;
  doc["tool"] = "epsub";
  doc["version"] = tool_version();
  doc["timestamp"] = iso_timestamp();
  doc["input_digest"] = input_digest(input_text);

  doc["config"] = {
      {"strategy", to_string(config.strategy)},
      {"budget", config.budget},
      {"apply_order", to_string(config.apply_order)},
      {"mode", to_string(config.effective_mode())},
      {"trace_format", config.trace_format},
      {"taut_threshold", config.taut_threshold},
  };

  doc["initial"] = {{"formulas", system_json(out.trace.initial)},
                    {"signature", out.trace.initial_signature}};

  auto steps = nlohmann::ordered_json::array();
  std::string path = "root";
  for (const auto& rec : out.trace.steps) {
    nlohmann::ordered_json js;
    js["index"] = rec.index;
    js["path"] = path;
    js["chosen"] = to_string(rec.chosen);
    auto wits = nlohmann::ordered_json::array();
    for (const auto& w : rec.witnesses) wits.push_back(to_string(w));
    js["witnesses"] = wits;
    js["parent_measure"] = measure_json(rec.parent_measure);
    auto branches = nlohmann::ordered_json::array();
    for (const auto& br : rec.branches) {
      nlohmann::ordered_json bj;
      bj["label"] = br.label;
      bj["measure"] = measure_json(br.measure);
      bj["measure_smaller"] = br.measure_smaller;
      auto vals = nlohmann::ordered_json::array();
      for (const auto& v : br.validation)
        vals.push_back({{"formula", to_string(v.formula)}, {"critical", v.critical}});
      bj["validation"] = vals;
      branches.push_back(std::move(bj));
    }
    js["branches"] = branches;
    js["resulting"] = system_json(rec.resulting);
    js["resulting_measure"] = measure_json(rec.resulting_measure);
    js["resulting_measure_smaller"] = rec.resulting_measure_smaller;
    js["signature"] = rec.signature;
    steps.push_back(std::move(js));
    path += "/" + std::to_string(rec.index);
  }
  doc["steps"] = steps;

  nlohmann::ordered_json res;
  res["status"] = status_str(out.status);
  res["steps"] = out.steps;
  if (out.loop_detected_at) res["loop_detected_at"] = *out.loop_detected_at;
  else res["loop_detected_at"] = nullptr;
  res["divergence_reasons"] = out.divergence_reasons;
  auto destroyed = nlohmann::ordered_json::array();
  for (const auto& d : out.destroyed)
    destroyed.push_back(
        {{"step", d.step}, {"branch", d.branch}, {"formula", to_string(d.formula)}});
  res["destroyed"] = destroyed;

  if (out.status == SolveOutcome::Status::Solved) {
    auto leaves = nlohmann::ordered_json::array();
    for (const auto& leaf : out.leaves) {
      auto steps_arr = nlohmann::ordered_json::array();
      for (const auto& st : leaf)
        steps_arr.push_back({to_string(st.epsilon_term), to_string(st.replacement)});
      leaves.push_back(std::move(steps_arr));
    }
    res["leaves"] = leaves;
    res["disjunction"] = out.disjunction ? to_string(out.disjunction) : "";
    nlohmann::ordered_json verdict;
    verdict["tautology"] = out.verdict && out.verdict->tautology;
    if (out.verdict && !out.verdict->tautology) {
      auto cm = nlohmann::ordered_json::array();
      for (const auto& [atom_str, value] : out.verdict->countermodel)
        cm.push_back({atom_str, value});
      verdict["countermodel"] = cm;
    }
    res["verdict"] = verdict;
  }
  doc["result"] = res;
  return doc;
}

std::string trace_text(const SolveOutcome& out) {
  std::ostringstream os;
  os << "initial system:\n";
  for (const auto& m : out.trace.initial.members) os << "  " << to_string(m.cf.formula) << "\n";
  for (const auto& rec : out.trace.steps) {
    os << "step " << rec.index << ": eliminate " << to_string(rec.chosen) << "\n";
    os << "  witnesses:";
    for (const auto& w : rec.witnesses) os << " " << to_string(w);
    os << "\n  parent measure " << to_string(rec.parent_measure) << "\n";
    for (const auto& br : rec.branches) {
      os << "  branch " << br.label << ": measure " << to_string(br.measure)
         << (br.measure_smaller ? " (smaller)" : " (NOT smaller)") << "\n";
      for (const auto& v : br.validation)
        if (!v.critical) os << "    destroyed: " << to_string(v.formula) << "\n";
    }
    os << "  system:\n";
    for (const auto& m : rec.resulting.members) os << "    " << to_string(m.cf.formula) << "\n";
  }
  return os.str();
}

std::string result_summary(const SolveOutcome& out, bool color) {
  auto paint = [&](const char* code, const std::string& s) {
    return color ? std::string("\033[") + code + "m" + s + "\033[0m" : s;
  };
  std::ostringstream os;
  if (out.status == SolveOutcome::Status::Diverged) {
    os << paint("31", "diverged") << " after " << out.steps << " steps (";
    for (std::size_t i = 0; i < out.divergence_reasons.size(); ++i) {
      if (i) os << ", ";
      os << out.divergence_reasons[i];
    }
    os << ")";
    if (out.loop_detected_at) os << "; loop detected at step " << *out.loop_detected_at;
    os << "\n";
    return os.str();
  }
  os << paint("32", "solved") << " in " << out.steps << " steps\n";
  os << "leaves (" << out.leaves.size() << "):\n";
  for (const auto& leaf : out.leaves) {
    os << "  [";
    for (std::size_t i = 0; i < leaf.size(); ++i) {
      if (i) os << ", ";
      os << "(" << to_string(leaf[i].epsilon_term) << " := " << to_string(leaf[i].replacement)
         << ")";
    }
    os << "]\n";
  }
  if (!out.destroyed.empty()) {
    os << "destroyed critical formulas (diagnostics):\n";
    for (const auto& d : out.destroyed)
      os << "  step " << d.step << ", branch " << d.branch << ": " << to_string(d.formula)
         << "\n";
  }
  if (out.disjunction) {
    os << "disjunction: " << to_string(out.disjunction) << "\n";
    if (out.verdict->tautology) {
      os << "verdict: " << paint("32", "tautology") << "\n";
    } else {
      os << "verdict: " << paint("31", "countermodel") << "\n";
      for (const auto& [k, v] : out.verdict->countermodel)
        os << "  " << k << " = " << (v ? "true" : "false") << "\n";
    }
  } else {
    os << "empty system: vacuously valid\n";
    os << "verdict: " << paint("32", "tautology") << "\n";
  }
  return os.str();
}

} // namespace epsub
