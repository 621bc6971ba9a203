#include <deque>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "simplebisim/error.hpp"
#include "simplebisim/fuzz.hpp"
#include "simplebisim/norms.hpp"
#include "simplebisim/oracle.hpp"
#include "support.hpp"

using namespace simplebisim;
using testing::s;
using testing::w;

namespace {

// Shortest path to the empty word by BFS over words, capped in depth and
// word length.
std::optional<std::uint64_t> bfs_norm(const Grammar& g, Nonterminal x, std::uint64_t depth_cap) {
  std::deque<std::pair<Word, std::uint64_t>> queue{{Word{x}, 0}};
  std::set<Word> seen{Word{x}};
  while (!queue.empty()) {
    auto [cur, d] = queue.front();
    queue.pop_front();
    if (cur.empty()) return d;
    if (d == depth_cap) continue;
    for (const Production& p : g.productions(cur.front())) {
      Word next = concat(p.rhs, drop(cur, 1));
      if (next.size() > depth_cap - d) continue;  // cannot empty in time
      if (seen.insert(next).second) queue.emplace_back(std::move(next), d + 1);
    }
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("extended naturals") {
  ExtendedNat one(1), inf = ExtendedNat::infinite();
  CHECK(one < inf);
  CHECK((one + ExtendedNat(2)) == ExtendedNat(3));
  CHECK((one + inf).is_infinite());
  CHECK(inf.to_string() == "inf");
  CHECK(ExtendedNat(7).to_string() == "7");
  CHECK_THROWS_AS(inf.value(), DomainError);
}

TEST_CASE("G1 norms") {
  Grammar g = testing::g1();
  NormTable t = compute_norms(g);
  for (const char* x : {"X", "Y", "Z", "W", "V"}) CHECK(t.norm(*g.find_nonterminal(x)) == ExtendedNat(1));
  for (const char* x : {"C", "D"}) CHECK(t.norm(*g.find_nonterminal(x)).is_infinite());
  CHECK(t.norm(w(g, "X Y Z")) == ExtendedNat(3));
  CHECK(t.norm(w(g, "X C")).is_infinite());
}

TEST_CASE("single-production grammars") {
  Grammar g = parse_grammar("A a ->\n");
  NormTable t = compute_norms(g);
  Nonterminal a = *g.find_nonterminal("A");
  CHECK(t.norm(a) == ExtendedNat(1));
  REQUIRE(t.canonical_step(a) != nullptr);
  CHECK(g.name(t.canonical_step(a)->label) == "a");
  CHECK(t.canonical_step(a)->rhs.empty());
  CHECK(valuation(t, g) == 0);

  Grammar h = parse_grammar("A a -> A A\n");
  NormTable th = compute_norms(h);
  Nonterminal ha = *h.find_nonterminal("A");
  CHECK(th.norm(ha).is_infinite());
  CHECK(th.canonical_step(ha) == nullptr);
  CHECK_FALSE(bfs_norm(h, ha, 5).has_value());
}

TEST_CASE("seminorm") {
  Grammar g = testing::g1();
  NormTable t = compute_norms(g);
  CHECK(seminorm(t, w(g, "Z C")) == 1);
  CHECK(seminorm(t, Word{}) == 0);
  CHECK(seminorm(t, w(g, "C")) == 0);
  CHECK(seminorm(t, w(g, "X Y C Z")) == 2);
}

TEST_CASE("norm_dynamic") {
  Grammar g = testing::g1();
  NormTable t = compute_norms(g);
  CHECK(s(g, norm_dynamic(t, w(g, "X C"), 0)) == "X C");
  CHECK(s(g, norm_dynamic(t, w(g, "X C"), 1)) == "C");
  CHECK(s(g, norm_dynamic(t, w(g, "Z C"), 1)) == "C");
  CHECK(s(g, norm_dynamic(t, w(g, "C"), 0)) == "C");
  CHECK(norm_dynamic(t, w(g, "X Y"), 2).empty());
  CHECK_THROWS_AS(norm_dynamic(t, w(g, "X C"), 2), DomainError);
}

TEST_CASE("canonical words and the terminal order") {
  Grammar g = testing::g1();
  NormTable t = compute_norms(g);
  auto cw = [&](const char* x) {
    std::string out;
    for (Terminal a : canonical_word(t, *g.find_nonterminal(x))) out += g.name(a);
    return out;
  };
  CHECK(cw("X") == "a");
  CHECK(cw("V") == "c");
  CHECK(cw("Z") == "a");
  CHECK_THROWS_AS(canonical_word(t, *g.find_nonterminal("C")), DomainError);
  CHECK(valuation(t, g) == 1);
}

TEST_CASE("nonterminal order: norm first, then index") {
  Grammar g = testing::g1();
  NormTable t = compute_norms(g);
  auto n = [&](const char* x) { return *g.find_nonterminal(x); };
  CHECK(t.symbol_less(n("X"), n("Y")));
  CHECK(t.symbol_less(n("V"), n("C")));
  CHECK(t.symbol_less(n("C"), n("D")));
  CHECK_FALSE(t.symbol_less(n("D"), n("V")));
  CHECK(t.word_less(Word{}, w(g, "X")));
  CHECK(t.word_less(w(g, "X C"), w(g, "X D")));
}

TEST_CASE("norm engine agrees with BFS on random grammars") {
  FuzzConfig cfg;
  cfg.max_nonterminals = 5;
  cfg.max_rhs = 3;
  cfg.inject_dead = false;
  for (std::size_t i = 0; i < 200; ++i) {
    std::mt19937_64 rng(instance_seed(99, i));
    Grammar g = random_instance(rng, cfg).grammar;
    NormTable t = compute_norms(g);
    for (std::uint32_t k = 0; k < g.nonterminal_count(); ++k) {
      auto x = static_cast<Nonterminal>(k);
      auto b = bfs_norm(g, x, 12);
      if (b) {
        CHECK(t.norm(x) == ExtendedNat(*b));
      } else {
        CHECK((t.norm(x).is_infinite() || t.norm(x).value() > 12));
      }
      if (t.is_normed(x)) CHECK(run(g, Word{x}, canonical_word(t, x)) == Word{});
    }
  }
}

TEST_CASE("norm_dynamic properties on random words") {
  FuzzConfig cfg;
  for (std::size_t i = 0; i < 100; ++i) {
    std::mt19937_64 rng(instance_seed(7, i));
    FuzzInstance inst = random_instance(rng, cfg);
    NormTable t = compute_norms(inst.grammar);
    const Word& word = inst.gamma;
    const std::uint64_t m = seminorm(t, word);
    for (std::uint64_t k = 0; k <= m; ++k) CHECK(seminorm(t, norm_dynamic(t, word, k)) == m - k);
    Word last = norm_dynamic(t, word, m);
    if (t.is_normed(word)) {
      CHECK(last.empty());
    } else {
      REQUIRE(last.size() >= 1);
      CHECK_FALSE(t.is_normed(last.front()));
    }
  }
}

TEST_CASE("bisimilar words have equal seminorms and normedness") {
  FuzzConfig cfg;
  for (std::size_t i = 0; i < 200; ++i) {
    std::mt19937_64 rng(instance_seed(11, i));
    FuzzInstance inst = random_instance(rng, cfg);
    NormTable t = compute_norms(inst.grammar);
    auto v = trace_closure_check(inst.grammar, inst.gamma, inst.delta);
    if (v.outcome != OracleOutcome::Yes || inst.grammar.has_dead_nonterminals()) continue;
    CHECK(seminorm(t, inst.gamma) == seminorm(t, inst.delta));
    CHECK(t.is_normed(inst.gamma) == t.is_normed(inst.delta));
  }
}

TEST_CASE("prune soundness against the closure oracle") {
  FuzzConfig cfg;
  for (std::size_t i = 0; i < 200; ++i) {
    std::mt19937_64 rng(instance_seed(13, i));
    FuzzInstance inst = random_instance(rng, cfg);
    NormTable t = compute_norms(inst.grammar);
    Word word = concat(inst.gamma, inst.delta);
    CHECK(trace_closure_check(inst.grammar, word, prune(t, word)).outcome != OracleOutcome::No);
  }
}
