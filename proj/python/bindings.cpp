// Python bindings. Results cross the boundary as JSON text and are decoded
// on the Python side.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "simplebisim/error.hpp"
#include "simplebisim/fuzz.hpp"
#include "simplebisim/report.hpp"
#include "simplebisim/session_types.hpp"

namespace py = pybind11;
using namespace simplebisim;
using nlohmann::json;

namespace {

std::string check(const std::string& grammar, const std::string& gamma, const std::string& delta, bool trace) {
  Grammar g = parse_grammar(grammar);
  DecideOptions o;
  o.trace = trace;
  BisimulationCheck c = check_bisimilar(g, parse_word(g, gamma), parse_word(g, delta), o);
  return decision_json(c.grammar, c).dump();
}

std::string check_types(const std::string& t, const std::string& u, bool trace) {
  DecideOptions o;
  o.trace = trace;
  BisimulationCheck c = check_type_equivalence(parse_type(t), parse_type(u), o);
  json doc = decision_json(c.grammar, c);
  doc["grammar"] = format_grammar(c.grammar);
  return doc.dump();
}

std::string norms(const std::string& grammar) {
  Grammar g = parse_grammar(grammar);
  return norms_json(g, compute_norms(g)).dump();
}

std::string congruence(const std::string& grammar, const std::string& basis, const std::string& gamma,
                       const std::string& delta, const std::string& mode) {
  Grammar g = parse_grammar(grammar);
  NormTable t = compute_norms(g);
  Basis b = parse_basis(g, basis);
  Word l = parse_word(g, gamma), r = parse_word(g, delta);
  if (mode == "coinductive") return congruence_json(g, decide_coinductive(b, g, t, l, r)).dump();
  if (mode == "inductive") return congruence_json(g, decide_inductive(b, g, t, l, r)).dump();
  throw py::value_error("mode must be 'coinductive' or 'inductive'");
}

std::string approximant(const std::string& grammar, const std::string& gamma, const std::string& delta,
                        std::uint64_t max_depth) {
  Grammar g = parse_grammar(grammar);
  ApproximantOptions o;
  o.max_depth = max_depth;
  return oracle_json(g, approximant_distinguish(g, parse_word(g, gamma), parse_word(g, delta), o)).dump();
}

std::string closure(const std::string& grammar, const std::string& gamma, const std::string& delta,
                    std::size_t len_cap) {
  Grammar g = parse_grammar(grammar);
  ClosureOptions o;
  o.len_cap = len_cap;
  return oracle_json(g, trace_closure_check(g, parse_word(g, gamma), parse_word(g, delta), o)).dump();
}

std::string fuzz(std::uint64_t seed, std::size_t count, bool inject_dead) {
  FuzzConfig cfg;
  cfg.seed = seed;
  cfg.count = count;
  cfg.inject_dead = inject_dead;
  FuzzReport r = run_fuzz(cfg);
  json issues = json::array();
  for (const FuzzDiscrepancy& d : r.discrepancies) {
    issues.push_back({{"index", d.index}, {"kind", d.kind}, {"detail", d.detail}, {"reproducer", d.reproducer}});
  }
  return json{{"instances", r.instances},
              {"bisimilar", r.bisimilar},
              {"not_bisimilar", r.not_bisimilar},
              {"yes_certified", r.yes_certified},
              {"no_certified", r.no_certified},
              {"max_iterations", r.max_iterations},
              {"max_basis_changes", r.max_basis_changes},
              {"discrepancies", std::move(issues)}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bisimilarity of simple grammars and equivalence of context-free session types";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ContractViolation>(m, "ContractViolation", base.ptr());

  m.def("check", &check, py::arg("grammar"), py::arg("gamma"), py::arg("delta"), py::arg("trace") = false);
  m.def("check_types", &check_types, py::arg("t"), py::arg("u"), py::arg("trace") = false);
  m.def("norms", &norms, py::arg("grammar"));
  m.def("congruence", &congruence, py::arg("grammar"), py::arg("basis"), py::arg("gamma"), py::arg("delta"),
        py::arg("mode") = "coinductive");
  m.def("approximant", &approximant, py::arg("grammar"), py::arg("gamma"), py::arg("delta"),
        py::arg("max_depth") = 64);
  m.def("closure", &closure, py::arg("grammar"), py::arg("gamma"), py::arg("delta"), py::arg("len_cap") = 64);
  m.def("fuzz", &fuzz, py::arg("seed") = 1, py::arg("count") = 100, py::arg("inject_dead") = false);
  m.def("render_tree", [](const std::string& tree) { return render_tree(json::parse(tree)); }, py::arg("tree"));
  m.def("format_type", [](const std::string& t) { return format_type(parse_type(t)); }, py::arg("text"));
}
