// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "simplebisim/basis_updating.hpp"
#include "simplebisim/congruence.hpp"
#include "simplebisim/error.hpp"
#include "simplebisim/fuzz.hpp"
#include "simplebisim/norms.hpp"
#include "simplebisim/oracle.hpp"
#include "simplebisim/report.hpp"
#include "simplebisim/session_types.hpp"
#include "support.hpp"
#include "trees.hpp"

using namespace simplebisim;
using nlohmann::json;
using testing::s;
using testing::w;

namespace {

using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto start = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "[exception: " << e.what() << "] ";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d %s  %s  (%.0f ms) %s\n", id, o.pass ? "PASS" : "FAIL", title.c_str(), ms_since(start),
              o.detail.str().c_str());
  std::fflush(stdout);
}

using StringPair = std::pair<std::string, std::string>;
StringPair upair(const Grammar& g, const Word& a, const Word& b) {
  std::string l = s(g, a), r = s(g, b);
  return l < r ? StringPair{l, r} : StringPair{r, l};
}
std::set<StringPair> unordered(const Grammar& g, const Basis& b) {
  std::set<StringPair> out;
  for (const BasisPair& p : b.pairs()) out.insert(upair(g, p.lhs, p.rhs));
  return out;
}

// All words of length <= 2 over the nonterminals of g.
std::vector<Word> short_words(const Grammar& g) {
  std::vector<Word> out{Word{}};
  const auto n = static_cast<std::uint32_t>(g.nonterminal_count());
  for (std::uint32_t i = 0; i < n; ++i) {
    out.push_back({static_cast<Nonterminal>(i)});
    for (std::uint32_t j = 0; j < n; ++j) out.push_back({static_cast<Nonterminal>(i), static_cast<Nonterminal>(j)});
  }
  return out;
}

// Runs, budget checks and certificates over the worked-example grammars.
struct CorpusResult {
  std::size_t runs = 0, yes = 0, no = 0;
  std::size_t yes_failures = 0, no_failures = 0, budget_failures = 0;
};

const CorpusResult& corpus() {
  static const CorpusResult result = [] {
    CorpusResult r;
    for (const Grammar& g : {testing::g1(), testing::g2()}) {
      std::vector<Word> words = short_words(g);
      for (std::size_t i = 0; i < words.size(); ++i) {
        for (std::size_t j = i; j < words.size(); ++j) {
          ++r.runs;
          BisimulationCheck c;
          try {
            c = check_bisimilar(g, words[i], words[j]);
          } catch (const BudgetExceeded&) {
            ++r.budget_failures;
            continue;
          }
          const DecisionStats& st = c.decision.stats;
          if (static_cast<long double>(st.iterations) > st.iteration_budget ||
              static_cast<long double>(st.basis_changes) > st.change_budget) {
            ++r.budget_failures;
          }
          if (c.decision.answer == Answer::Bisimilar) {
            ++r.yes;
            bool ok = check_self_bisimulation(c.decision.basis, c.grammar, c.norms).ok &&
                      decide_coinductive(c.decision.basis, c.grammar, c.norms, c.gamma, c.delta).congruent;
            if (!ok) ++r.yes_failures;
          } else {
            ++r.no;
            if (approximant_distinguish(g, words[i], words[j]).outcome != OracleOutcome::No) ++r.no_failures;
          }
        }
      }
    }
    return r;
  }();
  return result;
}

const FuzzReport& fuzz() {
  static const FuzzReport r = [] {
    FuzzConfig cfg;
    cfg.seed = 1;
    cfg.count = 1000;
    cfg.max_nonterminals = 6;
    cfg.max_terminals = 3;
    cfg.max_rhs = 2;
    return run_fuzz(cfg);
  }();
  return r;
}

std::size_t discrepancies(const FuzzReport& r, std::initializer_list<const char*> kinds) {
  return static_cast<std::size_t>(std::count_if(r.discrepancies.begin(), r.discrepancies.end(), [&](const FuzzDiscrepancy& d) {
    return std::find(kinds.begin(), kinds.end(), d.kind) != kinds.end();
  }));
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return num / den;
}

std::optional<std::uint64_t> bfs_norm(const Grammar& g, Nonterminal x, std::uint64_t cap) {
  std::deque<std::pair<Word, std::uint64_t>> queue{{Word{x}, 0}};
  std::set<Word> seen{Word{x}};
  while (!queue.empty()) {
    auto [cur, d] = queue.front();
    queue.pop_front();
    if (cur.empty()) return d;
    if (d == cap) continue;
    for (const Production& p : g.productions(cur.front())) {
      Word next = concat(p.rhs, drop(cur, 1));
      if (next.size() > cap - d) continue;
      if (seen.insert(next).second) queue.emplace_back(std::move(next), d + 1);
    }
  }
  return std::nullopt;
}

std::string repeat(const std::string& unit, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? " ; " : "") + unit;
  return out;
}

}  // namespace

int main() {
  const Grammar g1 = testing::g1();
  const Grammar g2 = testing::g2();

  report(1, "negative worked example", [&](Outcome& o) {
    auto start = Clock::now();
    DecideOptions opts;
    opts.trace = true;
    BisimulationCheck c = check_bisimilar(g1, w(g1, "X C"), w(g1, "Y C"), opts);
    const double elapsed = ms_since(start);
    const Decision& d = c.decision;
    json doc = json::parse(decision_json(c.grammar, c).dump());
    o.require(doc["verdict"] == "not-bisimilar", "verdict");
    o.require(doc["phases"].size() == 2, "two phases");
    if (doc["phases"].size() == 2) {
      o.require(render_tree(doc["phases"][0]["tree"]) == expected::kNegativePhase1, "phase 1 tree");
      o.require(render_tree(doc["phases"][1]["tree"]) == expected::kNegativeFinal, "final tree");
      o.require(doc["phases"][0]["tree"]["mark"] == "BPA1" && doc["phases"][0]["tree"]["children"].size() == 4,
                "BPA1 guess with four children");
    }
    auto pf = std::find_if(d.events.begin(), d.events.end(), [](const TraceEvent& e) { return e.kind == "partial-failure-replace"; });
    bool replaced = false;
    if (pf != d.events.end()) {
      std::set<StringPair> added, removed;
      for (const BasisPair& p : pf->basis_added) added.insert(upair(g1, p.lhs, p.rhs));
      for (const BasisPair& p : pf->basis_removed) removed.insert(upair(g1, p.lhs, p.rhs));
      replaced = added.count({"X C", "Y C"}) && removed.count({"X", "Y"}) && pf->s_added.size() == 1 &&
                 g1.name(pf->s_added[0].first) == "X" && g1.name(pf->s_added[0].second) == "Y";
    }
    const bool failed_at_ev = std::any_of(d.events.begin(), d.events.end(), [&](const TraceEvent& e) {
      return e.kind == "empty-vs-nonempty" && e.pair.first.empty() && s(g1, e.pair.second) == "V";
    });
    o.require(failed_at_ev, "partial failure at (eps, V)");
    o.require(replaced, "(X,Y) replaced by (XC,YC), S gains (X,Y)");
    o.require(d.total_failure && upair(g1, d.total_failure->first, d.total_failure->second) == StringPair{"C", "D"},
              "total failure at (C,D)");
    o.require(elapsed < 1000.0, "runtime");
    o.detail << "iterations=" << d.stats.iterations << " decide_ms=" << elapsed;
  });

  report(2, "positive worked example", [&](Outcome& o) {
    auto start = Clock::now();
    DecideOptions opts;
    opts.trace = true;
    BisimulationCheck c = check_bisimilar(g2, w(g2, "X C"), w(g2, "Y C"), opts);
    const double elapsed = ms_since(start);
    const Decision& d = c.decision;
    Basis expected = Basis::reflexive(g2);
    for (auto [l, r] : {std::pair{"X C", "Y C"}, {"Z", "W"}, {"C", "D"}, {"C", "V C"}}) expected.add(w(g2, l), w(g2, r));
    o.require(d.answer == Answer::Bisimilar, "verdict");
    o.require(unordered(g2, d.basis) == unordered(g2, expected), "final basis");
    o.require(d.s_set.size() == 1 && g2.name(d.s_set[0].first) == "X" && g2.name(d.s_set[0].second) == "Y", "S");
    json doc = json::parse(decision_json(c.grammar, c).dump());
    o.require(!doc["phases"].empty() && render_tree(doc["phases"].back()["tree"]) == expected::kPositiveFinal, "final tree");
    o.require(elapsed < 1000.0, "runtime");
    o.detail << "basis=" << d.basis.size() << " pairs decide_ms=" << elapsed;
  });

  report(3, "YES certification", [&](Outcome& o) {
    const CorpusResult& c = corpus();
    const FuzzReport& f = fuzz();
    o.require(c.yes_failures == 0, "corpus");
    o.require(f.yes_certified == f.bisimilar && discrepancies(f, {"yes-certificate", "decide-error"}) == 0, "fuzz");
    o.detail << "corpus yes=" << c.yes << " fuzz yes=" << f.bisimilar << " certified=" << f.yes_certified;
  });

  report(4, "NO certification", [&](Outcome& o) {
    const CorpusResult& c = corpus();
    const FuzzReport& f = fuzz();
    o.require(c.no_failures == 0, "corpus");
    o.require(f.no_certified == f.not_bisimilar && discrepancies(f, {"no-certificate"}) == 0, "fuzz");
    o.detail << "corpus no=" << c.no << " fuzz no=" << f.not_bisimilar << " certified=" << f.no_certified
             << " max_depth=" << f.max_distinguishing_depth;
  });

  report(5, "termination budget", [&](Outcome& o) {
    const CorpusResult& c = corpus();
    const FuzzReport& f = fuzz();
    o.require(c.budget_failures == 0, "corpus budgets");
    o.require(discrepancies(f, {"decide-error"}) == 0, "fuzz budgets");
    // rec x . (?int)^k ; x against its one-step rotation; the valuation is k - 1.
    std::vector<double> vs, its;
    for (std::size_t v = 2; v <= 21; ++v) {
      TypePtr t = parse_type("rec x . " + repeat("?int", v) + " ; x");
      TypePtr u = parse_type("?int ; rec y . " + repeat("?int", v) + " ; y");
      BisimulationCheck chk = check_type_equivalence(t, u);
      o.require(chk.decision.answer == Answer::Bisimilar, "family verdict v=" + std::to_string(v));
      vs.push_back(static_cast<double>(budget_valuation(chk.grammar, chk.norms, chk.gamma, chk.delta)));
      its.push_back(static_cast<double>(chk.decision.stats.iterations));
    }
    o.require(vs.front() == 1.0 && vs.back() == 20.0, "family valuations 1..20");
    const double slope = loglog_slope(vs, its);
    o.require(slope < 6.0, "log-log slope");
    o.detail << "corpus runs=" << c.runs << " fuzz max_iterations=" << f.max_iterations
             << " max_basis_changes=" << f.max_basis_changes << " family v=" << vs.front() << ".." << vs.back()
             << " iterations=" << its.front() << ".." << its.back() << " slope=" << slope;
  });

  report(6, "congruence separations", [&](Outcome& o) {
    Grammar g = parse_grammar("%simple\nX a -> X\nY a -> Y\nZ a -> Z\nW a -> W\n");
    NormTable t = compute_norms(g);
    Basis b = parse_basis(g, "X == Y W Y Z\nZ == W X\n");
    Basis chain = parse_basis(g, "X == Y\nY == Z\n");
    auto timed = [&](auto fn) {
      auto start = Clock::now();
      bool r = fn();
      double ms = ms_since(start);
      o.require(ms < 10.0, "runtime");
      return std::pair{r, ms};
    };
    auto [co, co_ms] = timed([&] { return decide_coinductive(b, g, t, w(g, "X"), w(g, "Y Z")).congruent; });
    auto [in, in_ms] = timed([&] { return decide_inductive(b, g, t, w(g, "X"), w(g, "Y Z")).congruent; });
    auto [xz, xz_ms] = timed([&] { return decide_coinductive(chain, g, t, w(g, "X"), w(g, "Z")).congruent; });
    o.require(co, "coinductive X == YZ");
    o.require(!in, "inductive X != YZ");
    o.require(!xz, "coinductive X != Z");
    o.detail << "ms=" << co_ms << "," << in_ms << "," << xz_ms;
  });

  report(7, "coinductive complexity guard", [&](Outcome& o) {
    const FuzzReport& f = fuzz();
    o.require(f.complexity_violations == 0, "violations");
    o.detail << "violations=" << f.complexity_violations << " over " << f.bisimilar << " certified runs";
  });

  report(8, "session types", [&](Outcome& o) {
    auto start = Clock::now();
    const char* examples[] = {
        "?int ; !bool",
        "rec x . ?int ; !bool ; x",
        "rec x . &{add: ?int ; ?int ; !int ; x, isprime: ?int ; !bool ; x, quit: skip}",
        "rec x . &{leaf: skip, node: x ; ?int ; x}",
    };
    for (const char* e : examples) o.require(is_type(parse_type(e)), std::string("well-formed ") + e);

    std::mt19937_64 rng(28);
    std::size_t bound_failures = 0;
    for (int i = 0; i < 500; ++i) {
      TypePtr t = random_type(rng);
      TypeConversion c = to_grammar({t});
      NormTable nt = compute_norms(c.grammar);
      const std::size_t n = size(t);
      if (c.grammar.nonterminal_count() > n || c.grammar.degree() > n || seminorm(nt, c.words[0]) > n ||
          valuation(nt, c.grammar) > n) {
        ++bound_failures;
      }
    }
    o.require(bound_failures == 0, "size bounds");

    RandomTypeConfig cfg;
    cfg.max_depth = 3;
    std::map<std::string, std::size_t> law_failures;
    for (int i = 0; i < 100; ++i) {
      TypePtr a = random_type(rng, cfg), b = random_type(rng, cfg), c = random_type(rng, cfg);
      TypePtr r;
      do r = random_type(rng, cfg);
      while (r->kind() != TypeKind::Rec);
      Branches lhs{{"l", a}, {"m", b}}, rhs{{"l", make_seq(a, c)}, {"m", make_seq(b, c)}};
      law_failures["neutral-left"] += !equivalent(make_seq(make_skip(), a), a);
      law_failures["neutral-right"] += !equivalent(make_seq(a, make_skip()), a);
      law_failures["associativity"] += !equivalent(make_seq(make_seq(a, b), c), make_seq(a, make_seq(b, c)));
      law_failures["distributivity-internal"] += !equivalent(make_seq(make_int_choice(lhs), c), make_int_choice(rhs));
      law_failures["distributivity-external"] += !equivalent(make_seq(make_ext_choice(lhs), c), make_ext_choice(rhs));
      law_failures["unfolding"] += !equivalent(r, substitute(r->left(), r->name(), r));
    }
    for (const auto& [law, n] : law_failures) o.require(n == 0, law);

    TypePtr tree = parse_type(examples[3]);
    o.require(equivalent(tree, parse_type("rec y . &{node: y ; ?int ; y, leaf: skip}")), "tree vs reordered labels");
    o.require(!equivalent(tree, parse_type("rec y . +{node: y ; ?int ; y, leaf: skip}")), "tree vs internal choice");
    const double elapsed = ms_since(start);
    o.require(elapsed < 60000.0, "runtime");
    o.detail << "random types=500 law instances=6x100 suite_ms=" << elapsed;
  });

  report(9, "norm engine", [&](Outcome& o) {
    NormTable t = compute_norms(g1);
    for (const char* x : {"X", "Y", "Z", "W", "V"}) o.require(t.norm(*g1.find_nonterminal(x)) == ExtendedNat(1), x);
    for (const char* x : {"C", "D"}) o.require(t.norm(*g1.find_nonterminal(x)).is_infinite(), x);
    FuzzConfig cfg;
    cfg.max_nonterminals = 6;
    cfg.max_rhs = 3;
    std::size_t mismatches = 0, finite = 0;
    for (std::size_t i = 0; i < 200; ++i) {
      std::mt19937_64 rng(instance_seed(909, i));
      Grammar g = random_instance(rng, cfg).grammar;
      NormTable nt = compute_norms(g);
      for (std::uint32_t k = 0; k < g.nonterminal_count(); ++k) {
        auto x = static_cast<Nonterminal>(k);
        auto b = bfs_norm(g, x, 12);
        if (b) {
          ++finite;
          mismatches += nt.norm(x) != ExtendedNat(*b);
        } else {
          mismatches += nt.norm(x).is_finite() && nt.norm(x).value() <= 12;
        }
      }
    }
    o.require(mismatches == 0, "random grammars");
    o.detail << "grammars=200 finite_norms=" << finite << " mismatches=" << mismatches;
  });

  report(10, "oracle cross-agreement", [&](Outcome& o) {
    const FuzzReport& f = fuzz();
    const std::size_t bad = discrepancies(f, {"closure-vs-decide", "closure-vs-approximant", "approximant-vs-decide"});
    o.require(bad == 0, "agreement");
    o.detail << "instances=" << f.instances << " closure_inconclusive=" << f.closure_inconclusive
             << " approximant_inconclusive=" << f.approximant_inconclusive;
  });

  std::printf("%s\n", failures == 0 ? "all criteria passed" : "some criteria failed");
  return failures == 0 ? 0 : 1;
}
