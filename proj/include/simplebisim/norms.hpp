#pragma once

// Norms, seminorms and canonical norm-reducing sequences.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simplebisim/grammar.hpp"

namespace simplebisim {

/// A natural number or infinity. Arithmetic saturates at infinity.
class ExtendedNat {
 public:
  constexpr ExtendedNat() = default;
  constexpr explicit ExtendedNat(std::uint64_t value) : finite_(true), value_(value) {}
  static constexpr ExtendedNat infinite() { return ExtendedNat(Tag{}); }

  constexpr bool is_finite() const noexcept { return finite_; }
  constexpr bool is_infinite() const noexcept { return !finite_; }
  /// The finite value; throws DomainError when infinite.
  std::uint64_t value() const;

  friend ExtendedNat operator+(ExtendedNat lhs, ExtendedNat rhs);
  friend constexpr bool operator==(ExtendedNat, ExtendedNat) = default;
  friend constexpr std::strong_ordering operator<=>(ExtendedNat lhs, ExtendedNat rhs) {
    if (lhs.finite_ != rhs.finite_) {
      return lhs.finite_ ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (!lhs.finite_) return std::strong_ordering::equal;
    return lhs.value_ <=> rhs.value_;
  }

  std::string to_string() const;

 private:
  struct Tag {};
  constexpr explicit ExtendedNat(Tag) : finite_(false), value_(0) {}

  bool finite_ = true;
  std::uint64_t value_ = 0;
};

/// The lexicographically least norm-reducing production X -a-> alpha_X.
struct CanonicalStep {
  Terminal label;
  Word rhs;
};

class NormTable {
 public:
  NormTable() = default;
  NormTable(std::vector<ExtendedNat> norms, std::vector<std::optional<CanonicalStep>> steps);

  std::size_t size() const noexcept { return norms_.size(); }

  ExtendedNat norm(Nonterminal x) const { return norms_.at(index_of(x)); }
  /// Norm of a word: the sum of its symbols' norms.
  ExtendedNat norm(const Word& w) const;
  bool is_normed(Nonterminal x) const { return norm(x).is_finite(); }
  bool is_normed(const Word& w) const;

  /// Defined exactly for normed nonterminals.
  const CanonicalStep* canonical_step(Nonterminal x) const;

  /// Total order used by the decision procedure: by norm (infinity last),
  /// ties by creation index.
  bool symbol_less(Nonterminal x, Nonterminal y) const;
  /// Extension of symbol_less to words: empty word first, then head symbol,
  /// then the remaining symbols lexicographically.
  bool word_less(const Word& lhs, const Word& rhs) const;

 private:
  std::vector<ExtendedNat> norms_;
  std::vector<std::optional<CanonicalStep>> steps_;
};

/// Norms of all nonterminals via a Dijkstra-style fixpoint (a production
/// becomes usable once every symbol of its right-hand side is settled).
/// Works for general context-free grammars.
NormTable compute_norms(const Grammar& g);

/// Norm of the maximal normed prefix of `w`.
std::uint64_t seminorm(const NormTable& t, const Word& w);

/// The k-th word of the canonical seminorm-reducing sequence of `w`.
/// Throws DomainError when k > seminorm(w).
Word norm_dynamic(const NormTable& t, const Word& w, std::uint64_t k);

/// Labels of the canonical norm-reducing sequence from `x` to the empty word.
/// Throws DomainError when `x` is unnormed.
std::vector<Terminal> canonical_word(const NormTable& t, Nonterminal x);

/// Maximum seminorm among right-hand sides of productions (0 when there are
/// no productions).
std::uint64_t valuation(const NormTable& t, const Grammar& g);

/// Drops every symbol after the first unnormed one.
Word prune(const NormTable& t, const Word& w);

}  // namespace simplebisim
