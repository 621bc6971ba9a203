// sgbisim: command-line front end.
//
// Exit codes: 0 positive verdict, 1 negative verdict, 2 usage or input
// error, 3 inconclusive (oracle only).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "simplebisim/basis_updating.hpp"
#include "simplebisim/congruence.hpp"
#include "simplebisim/error.hpp"
#include "simplebisim/fuzz.hpp"
#include "simplebisim/norms.hpp"
#include "simplebisim/oracle.hpp"
#include "simplebisim/report.hpp"
#include "simplebisim/session_types.hpp"

namespace sb = simplebisim;
using nlohmann::json;

namespace {

constexpr int kPositive = 0;
constexpr int kNegative = 1;
constexpr int kInputError = 2;
constexpr int kInconclusive = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sb::Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sb::Grammar load_grammar(const std::string& path) {
  sb::GrammarDocument doc = sb::parse_grammar_document(read_file(path));
  return std::move(doc.grammar);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

struct Common {
  std::string trace;
  bool stats = false;
  bool explain = false;
  bool json() const { return trace == "json"; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--trace", c.trace, "Emit the full run report in the given format")->check(CLI::IsMember({"json"}));
  cmd->add_flag("--stats", c.stats, "Print run statistics");
  cmd->add_flag("--explain", c.explain, "Print derivation trees or proof searches");
}

void print_stats(const sb::DecisionStats& s, double wall_ms) {
  std::cout << "iterations " << s.iterations << '\n'
            << "basis-changes " << s.basis_changes << '\n'
            << "partial-failures " << s.partial_failures << '\n'
            << "peak-seminorm " << s.peak_seminorm << '\n'
            << "wall-ms " << wall_ms << '\n';
}

int report_check(const sb::BisimulationCheck& check, const Common& c, const json& command, double wall_ms) {
  const sb::Decision& d = check.decision;
  if (c.json()) {
    json doc = sb::decision_json(check.grammar, check);
    doc["command"] = command;
    doc["stats"]["wall_ms"] = wall_ms;
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << sb::to_string(d.answer) << '\n';
    if (c.explain) {
      for (const sb::TreeSnapshot& snap : d.phases) {
        std::cout << "# " << snap.reason << " (step " << snap.step << ")\n"
                  << sb::render_tree(sb::tree_json(check.grammar, snap));
      }
      std::cout << "# basis\n" << sb::format_basis(check.grammar, d.basis);
    }
    if (c.stats) print_stats(d.stats, wall_ms);
  }
  return d.answer == sb::Answer::Bisimilar ? kPositive : kNegative;
}

void print_proof(const sb::Grammar& g, const sb::CongruenceVerdict& v, std::size_t id, int depth) {
  const sb::ProofNode& n = v.nodes[id];
  std::cout << std::string(2 * depth, ' ') << sb::to_string(n.rule) << ' ' << sb::format_word(g, n.pair.first) << " , "
            << sb::format_word(g, n.pair.second) << '\n';
  for (std::size_t child : n.children) print_proof(g, v, child, depth + 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bisimilarity of simple grammars and equivalence of context-free session types"};
  app.require_subcommand(1);
  json command = json::array();
  for (int i = 0; i < argc; ++i) command.push_back(argv[i]);

  // check
  Common check_opts;
  std::string check_grammar, check_gamma, check_delta;
  auto* check = app.add_subcommand("check", "Decide bisimilarity of two words of a simple grammar");
  check->add_option("grammar", check_grammar, "Grammar file")->required();
  check->add_option("gamma", check_gamma, "First word, space separated ('-' for empty)")->required();
  check->add_option("delta", check_delta, "Second word")->required();
  add_common(check, check_opts);

  // typeq
  Common typeq_opts;
  std::vector<std::string> typeq_files, typeq_exprs;
  auto* typeq = app.add_subcommand("typeq", "Decide equivalence of two session types");
  typeq->add_option("files", typeq_files, "Files holding one type each");
  typeq->add_option("-e,--expr", typeq_exprs, "Type given inline");
  add_common(typeq, typeq_opts);

  // norms
  Common norms_opts;
  std::string norms_grammar;
  auto* norms = app.add_subcommand("norms", "Print the norm of every nonterminal");
  norms->add_option("grammar", norms_grammar, "Grammar file")->required();
  add_common(norms, norms_opts);

  // congruence
  Common cong_opts;
  std::string cong_grammar, cong_basis, cong_gamma, cong_delta, cong_mode = "coinductive";
  auto* cong = app.add_subcommand("congruence", "Decide membership in the congruence generated by a basis");
  cong->add_option("grammar", cong_grammar, "Grammar file")->required();
  cong->add_option("basis", cong_basis, "Basis file, one `lhs == rhs` per line")->required();
  cong->add_option("gamma", cong_gamma, "First word")->required();
  cong->add_option("delta", cong_delta, "Second word")->required();
  cong->add_option("--mode", cong_mode, "Congruence to decide")->check(CLI::IsMember({"coinductive", "inductive"}));
  add_common(cong, cong_opts);

  // oracle
  Common oracle_opts;
  std::string oracle_kind, oracle_grammar, oracle_gamma, oracle_delta;
  std::uint64_t max_depth = 64;
  std::size_t len_cap = 64;
  auto* oracle = app.add_subcommand("oracle", "Run an independent bisimilarity oracle");
  oracle->add_option("kind", oracle_kind, "approximant or closure")->required()->check(CLI::IsMember({"approximant", "closure"}));
  oracle->add_option("grammar", oracle_grammar, "Grammar file")->required();
  oracle->add_option("gamma", oracle_gamma, "First word")->required();
  oracle->add_option("delta", oracle_delta, "Second word")->required();
  oracle->add_option("--max-depth", max_depth, "Approximant depth bound");
  oracle->add_option("--len-cap", len_cap, "Closure word-length cap");
  add_common(oracle, oracle_opts);

  // fuzz
  Common fuzz_opts;
  sb::FuzzConfig fuzz_cfg;
  std::string fuzz_out;
  auto* fuzz = app.add_subcommand("fuzz", "Cross-check the decision procedure on random grammars");
  fuzz->add_option("--seed", fuzz_cfg.seed, "Base seed");
  fuzz->add_option("--count", fuzz_cfg.count, "Number of instances");
  fuzz->add_option("--max-nonterminals", fuzz_cfg.max_nonterminals)->check(CLI::PositiveNumber);
  fuzz->add_option("--max-terminals", fuzz_cfg.max_terminals)->check(CLI::PositiveNumber);
  fuzz->add_option("--max-rhs", fuzz_cfg.max_rhs);
  fuzz->add_flag("--inject-dead", fuzz_cfg.inject_dead, "Leave nonterminals without productions");
  fuzz->add_option("--max-depth", fuzz_cfg.max_depth, "Approximant depth bound");
  fuzz->add_option("--len-cap", fuzz_cfg.len_cap, "Closure word-length cap");
  fuzz->add_option("--reproducers", fuzz_out, "Directory for counterexample files");
  add_common(fuzz, fuzz_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return kInputError;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (*check) {
      sb::Grammar g = load_grammar(check_grammar);
      sb::DecideOptions opts;
      opts.trace = check_opts.json() || check_opts.explain;
      auto result = sb::check_bisimilar(g, sb::parse_word(g, check_gamma), sb::parse_word(g, check_delta), opts);
      return report_check(result, check_opts, command, elapsed_ms(start));
    }

    if (*typeq) {
      std::vector<std::string> sources;
      for (const std::string& f : typeq_files) sources.push_back(read_file(f));
      for (const std::string& e : typeq_exprs) sources.push_back(e);
      if (sources.size() != 2) {
        std::cerr << "typeq needs exactly two types (files or -e)\n";
        return kInputError;
      }
      sb::TypePtr t = sb::parse_type(sources[0]);
      sb::TypePtr u = sb::parse_type(sources[1]);
      for (const sb::TypePtr& x : {t, u}) {
        if (auto err = sb::type_error(x)) throw sb::Error(sb::format_type(x) + ": " + *err);
      }
      sb::DecideOptions opts;
      opts.trace = typeq_opts.json() || typeq_opts.explain;
      auto result = sb::check_type_equivalence(t, u, opts);
      if (typeq_opts.explain && !typeq_opts.json()) std::cout << "# grammar\n" << sb::format_grammar(result.grammar);
      return report_check(result, typeq_opts, command, elapsed_ms(start));
    }

    if (*norms) {
      sb::Grammar g = load_grammar(norms_grammar);
      sb::NormTable t = sb::compute_norms(g);
      if (norms_opts.json()) {
        json doc{{"schema", sb::kTraceSchema}, {"command", command}, {"norms", sb::norms_json(g, t)}};
        std::cout << doc.dump(2) << '\n';
      } else {
        for (std::size_t i = 0; i < g.nonterminal_count(); ++i) {
          sb::Nonterminal x{static_cast<std::uint32_t>(i)};
          std::cout << g.name(x) << ' ' << t.norm(x).to_string() << '\n';
        }
      }
      return kPositive;
    }

    if (*cong) {
      sb::Grammar g = load_grammar(cong_grammar);
      sb::Basis b = sb::parse_basis(g, read_file(cong_basis));
      sb::NormTable t = sb::compute_norms(g);
      sb::Word gamma = sb::parse_word(g, cong_gamma);
      sb::Word delta = sb::parse_word(g, cong_delta);
      auto v = cong_mode == "inductive" ? sb::decide_inductive(b, g, t, gamma, delta)
                                        : sb::decide_coinductive(b, g, t, gamma, delta);
      if (cong_opts.json()) {
        json doc = sb::congruence_json(g, v);
        doc["command"] = command;
        doc["mode"] = cong_mode;
        std::cout << doc.dump(2) << '\n';
      } else {
        std::cout << (v.congruent ? "congruent" : "not-congruent") << '\n';
        if (cong_opts.explain && !v.nodes.empty()) print_proof(g, v, 0, 0);
        if (cong_opts.stats) std::cout << "distinct-pairs " << v.distinct_pairs << '\n' << "wall-ms " << elapsed_ms(start) << '\n';
      }
      return v.congruent ? kPositive : kNegative;
    }

    if (*oracle) {
      sb::Grammar g = load_grammar(oracle_grammar);
      sb::Word gamma = sb::parse_word(g, oracle_gamma);
      sb::Word delta = sb::parse_word(g, oracle_delta);
      sb::OracleVerdict v;
      if (oracle_kind == "approximant") {
        sb::ApproximantOptions o;
        o.max_depth = max_depth;
        v = sb::approximant_distinguish(g, gamma, delta, o);
      } else {
        sb::ClosureOptions o;
        o.len_cap = len_cap;
        v = sb::trace_closure_check(g, gamma, delta, o);
      }
      if (oracle_opts.json()) {
        json doc = sb::oracle_json(g, v);
        doc["command"] = command;
        doc["oracle"] = oracle_kind;
        std::cout << doc.dump(2) << '\n';
      } else {
        std::cout << sb::to_string(v.outcome) << '\n';
        if (v.outcome == sb::OracleOutcome::No) {
          std::cout << "depth " << v.depth << '\n' << "witness";
          for (sb::Terminal a : v.witness) std::cout << ' ' << g.name(a);
          std::cout << '\n';
        }
        if (oracle_opts.stats) std::cout << "pairs-explored " << v.pairs_explored << '\n' << "wall-ms " << elapsed_ms(start) << '\n';
      }
      switch (v.outcome) {
        case sb::OracleOutcome::Yes: return kPositive;
        case sb::OracleOutcome::No: return kNegative;
        default: return kInconclusive;
      }
    }

    if (*fuzz) {
      sb::FuzzReport report = sb::run_fuzz(fuzz_cfg);
      if (!fuzz_out.empty() && !report.discrepancies.empty()) {
        std::filesystem::create_directories(fuzz_out);
        for (const sb::FuzzDiscrepancy& d : report.discrepancies) {
          std::ofstream(std::filesystem::path(fuzz_out) / ("instance-" + std::to_string(d.index) + ".sg"))
              << "# " << d.kind << ": " << d.detail << '\n'
              << d.reproducer;
        }
      }
      if (fuzz_opts.json()) {
        json doc{{"schema", sb::kTraceSchema}, {"command", command}, {"summary", report.summary()}};
        json items = json::array();
        for (const sb::FuzzDiscrepancy& d : report.discrepancies) {
          items.push_back({{"index", d.index}, {"kind", d.kind}, {"detail", d.detail}, {"reproducer", d.reproducer}});
        }
        doc["discrepancies"] = items;
        std::cout << doc.dump(2) << '\n';
      } else {
        std::cout << report.summary();
        if (!report.discrepancies.empty() && fuzz_out.empty()) {
          for (const sb::FuzzDiscrepancy& d : report.discrepancies) {
            std::cerr << "# instance " << d.index << ' ' << d.kind << '\n' << d.reproducer;
          }
        }
      }
      return report.discrepancies.empty() ? kPositive : kNegative;
    }
  } catch (const sb::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kInputError;
  } catch (const sb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
