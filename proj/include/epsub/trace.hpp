#pragma once

// CLI-facing run configuration and trace documents (text and JSON). A JSON
// document is byte-identical across reruns of the same input and config,
// except for the timestamp field; it validates against schema/trace.schema.json.

#include "epsub/engine.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace epsub {

struct RunConfig {
  Strategy strategy = Strategy::MaximalComplexity;
  int budget = 100;
  ApplyOrder apply_order = ApplyOrder::Recorded;
  std::optional<Mode> mode; // strict for maximal, permissive otherwise
  std::string trace_format = "text"; // "text" | "json"
  std::optional<std::string> trace_out;
  unsigned taut_threshold = 20;

  Mode effective_mode() const {
    return mode.value_or(strategy == Strategy::MaximalComplexity ? Mode::Strict
                                                                 : Mode::Permissive);
  }
  SolveOptions solve_options() const {
    SolveOptions o;
    o.strategy = strategy;
    o.budget = budget;
    o.apply_order = apply_order;
    o.mode = effective_mode();
    o.taut_threshold = taut_threshold;
    return o;
  }
};

std::string tool_version();

// FNV-1a 64-bit, rendered as "fnv1a64:<hex>".
std::string input_digest(const std::string& text);

nlohmann::ordered_json trace_document(const SolveOutcome& outcome, const RunConfig& config,
                                      const std::string& input_text);

std::string trace_text(const SolveOutcome& outcome);

// One-paragraph result summary: leaves, disjunction, verdict.
std::string result_summary(const SolveOutcome& outcome, bool color);

} // namespace epsub
