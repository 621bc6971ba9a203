#include <chrono>
#include <map>
#include <random>

#include "doctest.h"
#include "simplebisim/basis_updating.hpp"
#include "simplebisim/congruence.hpp"
#include "simplebisim/error.hpp"
#include "simplebisim/fuzz.hpp"
#include "simplebisim/oracle.hpp"
#include "support.hpp"

using namespace simplebisim;
using testing::s;
using testing::w;

namespace {

// The separation examples only need the four names.
Grammar four() { return parse_grammar("%simple\nX a -> X\nY a -> Y\nZ a -> Z\nW a -> W\n"); }

Basis basis_of(const Grammar& g, const char* text) { return parse_basis(g, text); }

}  // namespace

TEST_CASE("basis container") {
  Grammar g = testing::g1();
  Basis b = Basis::reflexive(g);
  CHECK(b.size() == 7);
  b.add(w(g, "X C"), w(g, "Y C"));
  b.add(w(g, "X C"), w(g, "Y C"));
  CHECK(b.size() == 8);
  CHECK(b.contains(w(g, "Y C"), w(g, "X C")));
  CHECK_THROWS(b.add(Word{}, w(g, "X")));
  CHECK(b.erase({w(g, "Y C"), w(g, "X C")}));
  CHECK(b.size() == 7);
  b.add(w(g, "Z"), w(g, "W"));
  CHECK(b.remove(*g.find_nonterminal("W"), *g.find_nonterminal("Z")) == 1);
  CHECK(b.max_word_length() == 1);

  Basis parsed = parse_basis(g, "# comment\nX C == Y C\n\nZ == W\n");
  CHECK(parsed.size() == 2);
  CHECK(parse_basis(g, format_basis(g, parsed)).pairs() == parsed.pairs());
  CHECK_THROWS_AS(parse_basis(g, "X C Y C\n"), ParseError);
}

TEST_CASE("basis predicates") {
  Grammar g = testing::g1();
  NormTable t = compute_norms(g);
  CHECK(check_basis_predicates(Basis::reflexive(g), t).all());

  Grammar h = parse_grammar("%simple\nX a ->\nY a ->\nZ a ->\n");
  NormTable th = compute_norms(h);
  Basis b = basis_of(h, "X == Y\nY == Z\n");
  CHECK_FALSE(check_basis_predicates(b, th).reflexive);

  Grammar g2 = testing::g2();
  NormTable t2 = compute_norms(g2);
  Basis fin = Basis::reflexive(g2);
  for (auto [l, r] : {std::pair{"X C", "Y C"}, {"Z", "W"}, {"C", "D"}, {"C", "V C"}}) fin.add(w(g2, l), w(g2, r));
  auto p = check_basis_predicates(fin, t2);
  CHECK(p.simple);
  CHECK(p.norm_compliant);
  CHECK(p.functional);
  CHECK(p.reflexive);

  // (X, Y C) with norm(X) = norm(Y) = 1 needs C = X after one step, which is eps.
  Basis nf = Basis::reflexive(g);
  nf.add(w(g, "X"), w(g, "Y C"));
  CHECK_FALSE(check_basis_predicates(nf, t).functional);
  // Unnormed heads are exempt.
  Basis un = Basis::reflexive(g);
  un.add(w(g, "C"), w(g, "D X"));
  CHECK(check_basis_predicates(un, t).functional);
}

TEST_CASE("coinductive and inductive congruence separate") {
  Grammar g = four();
  NormTable t = compute_norms(g);
  Basis b = basis_of(g, "X == Y W Y Z\nZ == W X\n");
  auto start = std::chrono::steady_clock::now();
  auto co = decide_coinductive(b, g, t, w(g, "X"), w(g, "Y Z"));
  auto in = decide_inductive(b, g, t, w(g, "X"), w(g, "Y Z"));
  auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  CHECK(co.congruent);
  CHECK_FALSE(in.congruent);
  CHECK(ms < 10.0);
  // The coinductive search alternates X == YZ and WYZ == Z.
  REQUIRE(co.nodes.size() >= 3);
  CHECK(co.nodes[0].rule == ProofRule::Bpa1L);
  CHECK(s(g, co.nodes[1].pair.first) == "W Y Z");
  CHECK(s(g, co.nodes[1].pair.second) == "Z");
  CHECK(co.nodes[1].rule == ProofRule::Bpa1R);
  CHECK(co.nodes[2].rule == ProofRule::Revisit);
  REQUIRE(in.stuck_pair() != nullptr);
  CHECK(in.nodes[in.refutation_path.back()].rule == ProofRule::Ancestor);

  Basis chain = basis_of(g, "X == Y\nY == Z\n");
  auto xz = decide_coinductive(chain, g, t, w(g, "X"), w(g, "Z"));
  CHECK_FALSE(xz.congruent);
  REQUIRE(xz.stuck_pair() != nullptr);
  CHECK(xz.nodes[xz.refutation_path.back()].rule == ProofRule::Stuck);
  CHECK_FALSE(decide_inductive(chain, g, t, w(g, "X"), w(g, "Z")).congruent);
}

TEST_CASE("axiom and reflexive goals") {
  Grammar g = testing::g1();
  NormTable t = compute_norms(g);
  Basis r = Basis::reflexive(g);
  CHECK(decide_coinductive(r, g, t, Word{}, Word{}).congruent);
  CHECK(decide_inductive(r, g, t, Word{}, Word{}).congruent);
  auto v = decide_inductive(r, g, t, w(g, "X C"), w(g, "X C"));
  CHECK(v.congruent);
  REQUIRE(v.nodes.size() == 3);
  CHECK(s(g, v.nodes[1].pair.first) == "C");
  CHECK(v.nodes[2].rule == ProofRule::EpsAxiom);
  CHECK(v.expanded_pairs + 1 == v.distinct_pairs);
  CHECK_FALSE(decide_coinductive(r, g, t, Word{}, w(g, "V")).congruent);
}

TEST_CASE("preconditions") {
  Grammar ns = parse_grammar("X a -> Z\nX a -> W\n");
  NormTable t = compute_norms(ns);
  CHECK_THROWS_AS(decide_coinductive(Basis::reflexive(ns), ns, t, Word{}, Word{}), ContractViolation);

  Grammar g = testing::g1();
  NormTable tg = compute_norms(g);
  Basis nf = Basis::reflexive(g);
  nf.add(w(g, "C"), w(g, "D"));
  nf.add(w(g, "C"), w(g, "D X"));
  CHECK_THROWS_AS(decide_coinductive(nf, g, tg, w(g, "C"), w(g, "D")), ContractViolation);
}

TEST_CASE("self-bisimulation") {
  Grammar g2 = testing::g2();
  NormTable t2 = compute_norms(g2);
  Basis fin = Basis::reflexive(g2);
  for (auto [l, r] : {std::pair{"X C", "Y C"}, {"Z", "W"}, {"C", "D"}, {"C", "V C"}}) fin.add(w(g2, l), w(g2, r));
  CHECK(check_self_bisimulation(fin, g2, t2).ok);

  Grammar g = testing::g1();
  NormTable t = compute_norms(g);
  CHECK(check_self_bisimulation(Basis::reflexive(g), g, t).ok);
  Basis xy = Basis::reflexive(g);
  xy.add(w(g, "X"), w(g, "Y"));
  auto rep = check_self_bisimulation(xy, g, t);
  CHECK_FALSE(rep.ok);
  // b leads to (Z C, W C), c to (eps, V); neither is in the congruence.
  REQUIRE(rep.failures.size() == 2);
  std::map<std::string, std::pair<std::string, std::string>> by_label;
  for (const auto& f : rep.failures) {
    CHECK(s(g, f.pair.lhs) + s(g, f.pair.rhs) == "XY");
    REQUIRE(f.lhs_successor.has_value());
    REQUIRE(f.rhs_successor.has_value());
    by_label[g.name(f.label)] = {s(g, *f.lhs_successor), s(g, *f.rhs_successor)};
  }
  CHECK(by_label["b"] == std::pair<std::string, std::string>{"Z C", "W C"});
  CHECK(by_label["c"] == std::pair<std::string, std::string>{"-", "V"});
}

TEST_CASE("inductive congruence implies coinductive on random bases") {
  FuzzConfig cfg;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < 400; ++i) {
    std::mt19937_64 rng(instance_seed(21, i));
    FuzzInstance inst = random_instance(rng, cfg);
    if (inst.grammar.has_dead_nonterminals()) continue;
    // Final bases of the decision procedure are simple and functional.
    BisimulationCheck c = check_bisimilar(inst.grammar, inst.gamma, inst.delta);
    std::mt19937_64 goals(i);
    for (int k = 0; k < 5; ++k) {
      FuzzInstance other = random_instance(goals, cfg);
      auto clamp = [&](Word word) {
        for (Nonterminal& x : word) x = static_cast<Nonterminal>(index_of(x) % c.grammar.nonterminal_count());
        return prune(c.norms, word);
      };
      Word a = clamp(other.gamma), b = clamp(other.delta);
      auto iv = decide_inductive(c.decision.basis, c.grammar, c.norms, a, b);
      auto cv = decide_coinductive(c.decision.basis, c.grammar, c.norms, a, b);
      if (iv.congruent) CHECK(cv.congruent);
      // Deterministic search.
      CHECK(decide_coinductive(c.decision.basis, c.grammar, c.norms, a, b).distinct_pairs == cv.distinct_pairs);
      // Sound for self-bisimulations.
      if (cv.congruent && check_self_bisimulation(c.decision.basis, c.grammar, c.norms).ok) {
        CHECK(trace_closure_check(c.grammar, a, b).outcome != OracleOutcome::No);
      }
      ++checked;
    }
  }
  CHECK(checked > 1000);
}
