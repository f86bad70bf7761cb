// Python bindings for the main operations: parsing, printing, translation,
// critical-formula recognition, complexity measures, the substitution engine
// and the tautology kernel.

#include "epsub/demos.hpp"
#include "epsub/engine.hpp"
#include "epsub/parse.hpp"
#include "epsub/print.hpp"
#include "epsub/trace.hpp"
#include "epsub/translate.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace epsub;

namespace {

struct PyTerm {
  TermPtr p;
};
struct PyFormula {
  FormulaPtr p;
};
struct PySystem {
  SystemE system;
  std::string source;
};

Strategy strategy_from(const std::string& s) {
  if (s == "maximal") return Strategy::MaximalComplexity;
  if (s == "first-listed") return Strategy::FirstListed;
  if (s == "min-degree") return Strategy::MinDegree;
  throw std::invalid_argument("strategy must be maximal, first-listed or min-degree");
}

RunConfig config_from(const std::string& strategy, int budget, const std::string& apply_order,
                      const std::optional<std::string>& mode, unsigned taut_threshold) {
  RunConfig cfg;
  cfg.strategy = strategy_from(strategy);
  cfg.budget = budget;
  if (apply_order == "reverse") cfg.apply_order = ApplyOrder::Reverse;
  else if (apply_order != "recorded")
    throw std::invalid_argument("apply_order must be recorded or reverse");
  if (mode) {
    if (*mode == "strict") cfg.mode = Mode::Strict;
    else if (*mode == "permissive") cfg.mode = Mode::Permissive;
    else throw std::invalid_argument("mode must be strict or permissive");
  }
  cfg.taut_threshold = taut_threshold;
  cfg.trace_format = "json";
  return cfg;
}

py::dict verdict_dict(const TautResult& r) {
  py::dict d;
  d["tautology"] = r.tautology;
  py::dict cm;
  for (const auto& [k, v] : r.countermodel) cm[py::str(k)] = v;
  d["countermodel"] = cm;
  return d;
}

py::dict outcome_dict(const SolveOutcome& out, const RunConfig& cfg, const std::string& source) {
  py::dict d;
  d["status"] = out.status == SolveOutcome::Status::Solved ? "solved" : "diverged";
  d["steps"] = out.steps;
  d["loop_detected_at"] =
      out.loop_detected_at ? py::object(py::int_(*out.loop_detected_at)) : py::none();
  d["divergence_reasons"] = out.divergence_reasons;
  py::list destroyed;
  for (const auto& rec : out.destroyed) {
    py::dict e;
    e["step"] = rec.step;
    e["branch"] = rec.branch;
    e["formula"] = to_string(rec.formula);
    destroyed.append(e);
  }
  d["destroyed"] = destroyed;
  py::list leaves;
  for (const auto& leaf : out.leaves) {
    py::list steps;
    for (const auto& st : leaf)
      steps.append(py::make_tuple(to_string(st.epsilon_term), to_string(st.replacement)));
    leaves.append(steps);
  }
  d["leaves"] = leaves;
  d["disjunction"] = out.disjunction ? py::object(py::str(to_string(out.disjunction))) : py::none();
  d["verdict"] = out.verdict ? py::object(verdict_dict(*out.verdict)) : py::none();
  d["trace_json"] = trace_document(out, cfg, source).dump(2);
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "epsilon substitution method for predicate logic";
  m.attr("__version__") = tool_version();

  py::class_<PyTerm>(m, "Term")
      .def("__str__", [](const PyTerm& t) { return to_string(t.p); })
      .def("__repr__", [](const PyTerm& t) { return "Term(" + to_string(t.p) + ")"; })
      .def("__eq__", [](const PyTerm& a, const PyTerm& b) { return alpha_eq(a.p, b.p); })
      .def("__hash__", [](const PyTerm& t) { return t.p->hash; })
      .def_property_readonly("is_epsilon", [](const PyTerm& t) { return t.p->is_eps(); });

  py::class_<PyFormula>(m, "Formula")
      .def("__str__", [](const PyFormula& f) { return to_string(f.p); })
      .def("__repr__", [](const PyFormula& f) { return "Formula(" + to_string(f.p) + ")"; })
      .def("__eq__", [](const PyFormula& a, const PyFormula& b) { return alpha_eq(a.p, b.p); })
      .def("__hash__", [](const PyFormula& f) { return f.p->hash; });

  py::class_<PySystem>(m, "System")
      .def("__len__", [](const PySystem& s) { return s.system.size(); })
      .def_property_readonly("formulas",
                             [](const PySystem& s) {
                               py::list out;
                               for (const auto& mem : s.system.members)
                                 out.append(PyFormula{mem.cf.formula});
                               return out;
                             })
      .def_property_readonly("owners", [](const PySystem& s) {
        py::list out;
        for (const auto& mem : s.system.members) out.append(PyTerm{mem.cf.epsilon_term});
        return out;
      });

  m.def("parse_term", [](const std::string& text) { return PyTerm{parse_term(text)}; });
  m.def("parse_formula", [](const std::string& text) { return PyFormula{parse_formula(text)}; });
  m.def("parse_system", [](const std::string& text) {
    auto file = parse_system_file(text);
    return PySystem{build_system(file.formulas), text};
  });

  m.def("alpha_eq", [](const PyTerm& a, const PyTerm& b) { return alpha_eq(a.p, b.p); });
  m.def("alpha_eq", [](const PyFormula& a, const PyFormula& b) { return alpha_eq(a.p, b.p); });

  m.def("epsilon_translate",
        [](const PyFormula& f) { return PyFormula{epsilon_translate(f.p)}; });

  m.def("substitute", [](const PyFormula& host, const PyTerm& target, const PyTerm& repl) {
    return PyFormula{substitute(host.p, target.p, repl.p)};
  });
  m.def("substitute", [](const PyTerm& host, const PyTerm& target, const PyTerm& repl) {
    return PyTerm{substitute(host.p, target.p, repl.p)};
  });

  m.def("epsilon_subterms", [](const PyFormula& f) {
    py::list out;
    for (const auto& occ : epsilon_subterms(f.p))
      out.append(py::make_tuple(PyTerm{occ.term}, occ.pos));
    return out;
  });

  m.def("rank", [](const PyTerm& t) { return rank(t.p); });
  m.def("degree", [](const PyTerm& t) { return degree(t.p); });
  m.def("is_subordinate",
        [](const PyTerm& inner, const PyTerm& outer) { return is_subordinate(inner.p, outer.p); });

  m.def("recognize_critical", [](const PyFormula& f) {
    py::list out;
    for (const auto& d : recognize_critical(f.p)) {
      py::dict e;
      e["epsilon"] = PyTerm{d.epsilon_term};
      e["witness"] = PyTerm{d.witness};
      out.append(e);
    }
    return out;
  });

  m.def("measure", [](const PySystem& s) {
    py::list out;
    for (const auto& c : measure(s.system).entries) out.append(py::make_tuple(c.rank, c.degree));
    return out;
  });
  m.def("select_maximal", [](const PySystem& s) { return PyTerm{select_maximal(s.system)}; });

  m.def(
      "is_tautology",
      [](const PyFormula& f, unsigned threshold) { return verdict_dict(is_tautology(f.p, threshold)); },
      py::arg("formula"), py::arg("taut_threshold") = 20);

  m.def(
      "herbrand_check",
      [](const std::string& var_name, const PyFormula& body, const std::vector<PyTerm>& witnesses,
         unsigned threshold) {
        std::vector<TermPtr> ws;
        for (const auto& w : witnesses) ws.push_back(w.p);
        return verdict_dict(herbrand_check(matrix(var_name, body.p), ws, threshold));
      },
      py::arg("var"), py::arg("body"), py::arg("witnesses"), py::arg("taut_threshold") = 20);

  m.def(
      "solve",
      [](const PySystem& s, const std::string& strategy, int budget, const std::string& apply_order,
         const std::optional<std::string>& mode, unsigned taut_threshold) {
        RunConfig cfg = config_from(strategy, budget, apply_order, mode, taut_threshold);
        auto out = solve(s.system, cfg.solve_options());
        return outcome_dict(out, cfg, s.source);
      },
      py::arg("system"), py::arg("strategy") = "maximal", py::arg("budget") = 100,
      py::arg("apply_order") = "recorded", py::arg("mode") = std::nullopt,
      py::arg("taut_threshold") = 20);

  m.def("ackermann_loop_source", &demos::ackermann_loop_source);
  m.def("identity_source", &demos::identity_source);
}
