#pragma once

// Context-free grammars in Greibach normal form and the labelled transition
// system they generate on words of nonterminals.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace simplebisim {

/// Interned nonterminal; the value is its creation index.
enum class Nonterminal : std::uint32_t {};
/// Interned terminal; the value is its creation index, which is also the
/// canonical terminal order.
enum class Terminal : std::uint32_t {};

constexpr std::uint32_t index_of(Nonterminal x) noexcept { return static_cast<std::uint32_t>(x); }
constexpr std::uint32_t index_of(Terminal a) noexcept { return static_cast<std::uint32_t>(a); }

/// Word of nonterminals, stored head-first. The empty vector is the empty word.
using Word = std::vector<Nonterminal>;
using WordPair = std::pair<Word, Word>;

/// Word concatenation.
Word concat(const Word& lhs, const Word& rhs);
/// `w` with its first `n` symbols dropped.
Word drop(const Word& w, std::size_t n);

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};
struct WordPairHash {
  std::size_t operator()(const WordPair& p) const noexcept;
};

struct Production {
  Terminal label;
  Word rhs;

  friend bool operator==(const Production&, const Production&) = default;
};

struct Transition {
  Terminal label;
  Word target;

  friend bool operator==(const Transition&, const Transition&) = default;
};

class Grammar {
 public:
  /// Returns the nonterminal called `name`, registering it if new.
  Nonterminal intern_nonterminal(std::string_view name);
  /// Returns the terminal called `name`, registering it if new.
  Terminal intern_terminal(std::string_view name);

  /// Adds X -a-> rhs. Re-adding an identical production is a no-op. Every
  /// symbol of `rhs` must already be registered.
  void add_production(Nonterminal x, Terminal a, Word rhs);

  std::size_t nonterminal_count() const noexcept { return nonterminal_names_.size(); }
  std::size_t terminal_count() const noexcept { return terminal_names_.size(); }
  std::size_t production_count() const noexcept;

  const std::string& name(Nonterminal x) const { return nonterminal_names_.at(index_of(x)); }
  const std::string& name(Terminal a) const { return terminal_names_.at(index_of(a)); }

  std::optional<Nonterminal> find_nonterminal(std::string_view name) const;
  std::optional<Terminal> find_terminal(std::string_view name) const;

  /// Productions of `x`, ordered by terminal index then right-hand side.
  std::span<const Production> productions(Nonterminal x) const {
    return productions_.at(index_of(x));
  }

  /// The unique right-hand side of X -a-> _, if any. For non-simple grammars
  /// returns the first in production order.
  const Word* successor(Nonterminal x, Terminal a) const;

  /// Distinct labels of the productions of `x`, ascending.
  std::vector<Terminal> labels(Nonterminal x) const;

  bool is_simple() const noexcept { return simple_; }
  bool is_dead(Nonterminal x) const { return productions(x).empty(); }
  std::vector<Nonterminal> dead_nonterminals() const;
  bool has_dead_nonterminals() const;

  /// Maximum number of productions of a single nonterminal.
  std::size_t degree() const;

  /// True iff every symbol of `w` belongs to this grammar.
  bool is_valid(const Word& w) const noexcept;

 private:
  std::vector<std::string> nonterminal_names_;
  std::vector<std::string> terminal_names_;
  std::unordered_map<std::string, Nonterminal> nonterminal_ids_;
  std::unordered_map<std::string, Terminal> terminal_ids_;
  std::vector<std::vector<Production>> productions_;
  bool simple_ = true;
};

/// Result of parsing a grammar document.
struct GrammarDocument {
  Grammar grammar;
  bool declared_simple = false;
};

/// Parses the line-oriented grammar format:
///
///     %simple            (optional header)
///     %nonterminals X Y  (optional; fixes the order, may declare dead ones)
///     %terminals a b     (optional; fixes the terminal order)
///     # comment
///     X a -> Y Z
///     X b ->
///
/// Throws ParseError (with line/column) on malformed input and
/// DeterminismError when `%simple` is declared and some (X, a) has two
/// different productions.
GrammarDocument parse_grammar_document(std::string_view text);
Grammar parse_grammar(std::string_view text);

/// Serialises `g` in the format accepted by parse_grammar. `%nonterminals`
/// and `%terminals` lines appear only when the production lines alone would
/// not reproduce the symbol order.
std::string format_grammar(const Grammar& g);

/// Parses a whitespace-separated list of nonterminal names; `-` (or an empty
/// string) is the empty word.
Word parse_word(const Grammar& g, std::string_view text);
/// Formats a word as space-separated names, `-` for the empty word.
std::string format_word(const Grammar& g, const Word& w);

/// All transitions of `w`: for w = X delta and X -a-> gamma, the transition
/// (a, gamma delta). Ordered by terminal, then right-hand side.
std::vector<Transition> transitions(const Grammar& g, const Word& w);

/// Follows the terminal word `u` from `w`. Requires a simple grammar
/// (throws ContractViolation otherwise). Returns nullopt when some step is
/// undefined.
std::optional<Word> run(const Grammar& g, const Word& w, std::span<const Terminal> u);

struct DeadElimination {
  Grammar grammar;
  std::vector<WordPair> pairs;
  /// Dead nonterminal appended to every query word, if any existed.
  std::optional<Nonterminal> bottom;
  /// The fresh self-loop terminal, if one was added.
  std::optional<Terminal> loop_terminal;
};

/// Gives every dead nonterminal a self-loop on a fresh terminal and appends
/// the lowest-index dead nonterminal to both words of every pair. Inputs are
/// returned unchanged when there is nothing to do. Bisimilarity of each pair
/// is preserved.
DeadElimination eliminate_dead(const Grammar& g, std::vector<WordPair> pairs);

}  // namespace simplebisim
