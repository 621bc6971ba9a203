#pragma once

// The basis-updating decision procedure for bisimilarity of words over a
// simple grammar.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simplebisim/congruence.hpp"
#include "simplebisim/grammar.hpp"
#include "simplebisim/norms.hpp"

namespace simplebisim {

enum class NodeMark : std::uint8_t {
  Unfinished,
  Loop,
  Refl,
  Unmarked,  // internal node produced by a basis rule (cases 4 and 5)
  Bpa1Guess,
  Bpa2Guess,
  PartialFailure,
  TotalFailure,
};

enum class EdgeKind : std::uint8_t { Root, Transition, Bpa1, Bpa2 };

const char* to_string(NodeMark m);
const char* to_string(EdgeKind e);

using NonterminalPair = std::pair<Nonterminal, Nonterminal>;

/// A copy of the live derivation tree. Pairs are in the caller's orientation.
struct TreeSnapshot {
  struct Node {
    WordPair pair;
    NodeMark mark = NodeMark::Unfinished;
    EdgeKind edge = EdgeKind::Root;
    Terminal label{};
    std::uint64_t step = 0;  // iteration that visited the node; 0 if never
    std::vector<std::size_t> children;
  };
  /// Why the snapshot was taken: "partial-failure" or "final".
  std::string reason;
  std::uint64_t step = 0;
  std::vector<Node> nodes;  // node 0 is the root
};

struct TraceEvent {
  std::uint64_t step = 0;
  /// Which case fired, e.g. "loop", "bpa1", "normed-normed-bpa1",
  /// "partial-failure-replace".
  std::string kind;
  WordPair pair;
  std::vector<BasisPair> basis_added;
  std::vector<BasisPair> basis_removed;
  std::vector<NonterminalPair> s_added;
};

struct DecisionStats {
  std::uint64_t iterations = 0;
  std::uint64_t basis_changes = 0;
  std::uint64_t partial_failures = 0;
  /// Partial-failure chains that ended without adding a new pair to S.
  std::uint64_t chains_without_new_s = 0;
  std::uint64_t peak_seminorm = 0;
  /// n^12 d^2 max(v,1)^2 and n^4 for this input.
  long double iteration_budget = 0;
  long double change_budget = 0;
};

enum class Answer : std::uint8_t { Bisimilar, NotBisimilar };
const char* to_string(Answer a);

struct Decision {
  Answer answer = Answer::NotBisimilar;
  Basis basis;
  /// Unordered nonterminal pairs, smaller index first, sorted.
  std::vector<NonterminalPair> s_set;
  /// Pairs of every node in the final tree.
  std::vector<WordPair> tree_pairs;
  /// NotBisimilar only: where the run stopped, and the nodes the final
  /// partial-failure chain passed through (empty if it failed directly).
  std::optional<WordPair> total_failure;
  std::vector<WordPair> failure_chain;
  DecisionStats stats;
  /// Filled when tracing: the tree before each subtree pruning, then the
  /// final tree.
  std::vector<TreeSnapshot> phases;
  std::vector<TraceEvent> events;
};

struct DecideOptions {
  bool trace = false;
  /// Throw BudgetExceeded when a budget is exceeded.
  bool enforce_budget = true;
};

/// Runs the algorithm on (gamma, delta). Requires a simple grammar without
/// dead nonterminals (ContractViolation otherwise). Words are pruned first.
Decision decide(const Grammar& g, const NormTable& t, const Word& gamma, const Word& delta,
                const DecideOptions& opts = {});

/// Full pipeline for arbitrary simple grammars: dead-symbol elimination,
/// norms, pruning and the decision. `grammar`/`norms`/`gamma`/`delta` are the
/// transformed inputs the decision refers to.
struct BisimulationCheck {
  Grammar grammar;
  NormTable norms;
  Word gamma;
  Word delta;
  Decision decision;
};
BisimulationCheck check_bisimilar(const Grammar& g, const Word& gamma, const Word& delta,
                                  const DecideOptions& opts = {});

/// The maximum seminorm among the given words and the grammar valuation,
/// at least 1.
std::uint64_t budget_valuation(const Grammar& g, const NormTable& t, const Word& gamma,
                               const Word& delta);

}  // namespace simplebisim
