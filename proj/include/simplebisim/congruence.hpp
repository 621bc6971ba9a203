#pragma once

// Bases of word pairs and the congruences they induce.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simplebisim/grammar.hpp"
#include "simplebisim/norms.hpp"

namespace simplebisim {

struct BasisPair {
  Word lhs;
  Word rhs;

  friend bool operator==(const BasisPair&, const BasisPair&) = default;
};

/// A finite relation on nonempty words, indexed by the unordered pair of
/// head nonterminals.
class Basis {
 public:
  using HeadKey = std::pair<std::uint32_t, std::uint32_t>;

  /// {(X, X) : X a nonterminal of g}.
  static Basis reflexive(const Grammar& g);

  static HeadKey key(Nonterminal x, Nonterminal y);

  /// Adds a pair; both words must be nonempty. Duplicates are ignored.
  void add(Word lhs, Word rhs);
  /// Removes every pair whose heads are {x, y}; returns how many.
  std::size_t remove(Nonterminal x, Nonterminal y);
  /// Removes one specific pair (either orientation). Returns true if found.
  bool erase(const BasisPair& p);

  /// The first stored pair with heads {x, y}, if any.
  const BasisPair* find(Nonterminal x, Nonterminal y) const;
  bool contains(const Word& lhs, const Word& rhs) const;

  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }
  /// All pairs ordered by head key, then insertion order.
  std::vector<BasisPair> pairs() const;
  /// Longest word appearing in the basis (0 when empty).
  std::size_t max_word_length() const;

 private:
  std::map<HeadKey, std::vector<BasisPair>> index_;
};

/// Parses lines `<word> == <word>`; `#` starts a comment line.
Basis parse_basis(const Grammar& g, std::string_view text);
std::string format_basis(const Grammar& g, const Basis& b);

struct BasisPredicates {
  bool reflexive = false;
  bool simple = false;
  bool functional = false;
  bool norm_compliant = false;

  bool all() const { return reflexive && simple && functional && norm_compliant; }
};

/// Each flag by direct enumeration. A pair whose left word is a single
/// symbol is read as (X, Y beta); otherwise, if its right word is a single
/// symbol, it is read with the sides swapped.
BasisPredicates check_basis_predicates(const Basis& b, const NormTable& t);

enum class ProofRule : std::uint8_t {
  EpsAxiom,
  Bpa1L,
  Bpa1R,
  Bpa2L,
  Bpa2R,
  Revisit,   // pair already seen; accepted without expansion
  Stuck,     // no rule applies
  Ancestor,  // inductive mode: repeats one of its own ancestors
};

const char* to_string(ProofRule r);

struct ProofNode {
  WordPair pair;
  ProofRule rule = ProofRule::Stuck;
  std::vector<std::size_t> children;
};

struct CongruenceVerdict {
  bool congruent = false;
  /// Proof-search tree in creation order; node 0 is the goal.
  std::vector<ProofNode> nodes;
  /// Distinct pairs visited by the search (orientation-insensitive).
  std::size_t distinct_pairs = 0;
  /// distinct_pairs without the (eps, eps) axiom leaf.
  std::size_t expanded_pairs = 0;
  /// On refutation: node ids from the goal down to the failing node.
  std::vector<std::size_t> refutation_path;

  const WordPair* stuck_pair() const {
    return refutation_path.empty() ? nullptr : &nodes[refutation_path.back()].pair;
  }
};

/// gamma and delta related by the coinductive congruence of b. Requires a
/// simple grammar and a simple, functional basis (ContractViolation
/// otherwise). BPA1 is preferred over BPA2.
CongruenceVerdict decide_coinductive(const Basis& b, const Grammar& g, const NormTable& t,
                                     const Word& gamma, const Word& delta);

/// Same proof search, but a goal repeating one of its ancestors refutes.
CongruenceVerdict decide_inductive(const Basis& b, const Grammar& g, const NormTable& t,
                                   const Word& gamma, const Word& delta);

struct SelfBisimulationFailure {
  BasisPair pair;
  Terminal label;
  /// Pruned successors; absent on the side that cannot move.
  std::optional<Word> lhs_successor;
  std::optional<Word> rhs_successor;
};

struct SelfBisimulationReport {
  bool ok = true;
  std::vector<SelfBisimulationFailure> failures;
};

/// Checks that matching transitions of every basis pair lead to pairs in
/// the coinductive congruence. Successor words are pruned first.
SelfBisimulationReport check_self_bisimulation(const Basis& b, const Grammar& g,
                                               const NormTable& t);

}  // namespace simplebisim
