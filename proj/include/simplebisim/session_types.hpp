#pragma once

// Context-free session types and their conversion to simple grammars.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "simplebisim/basis_updating.hpp"
#include "simplebisim/grammar.hpp"

namespace simplebisim {

enum class TypeKind : std::uint8_t { In, Out, IntChoice, ExtChoice, Skip, Seq, Var, Rec };

class SessionType;
using TypePtr = std::shared_ptr<const SessionType>;
using Branches = std::map<std::string, TypePtr>;

/// Immutable pretype node.
class SessionType {
 public:
  TypeKind kind() const noexcept { return kind_; }
  /// Message type (In/Out), variable name (Var) or binder (Rec).
  const std::string& name() const noexcept { return name_; }
  /// Choice branches, ordered by label.
  const Branches& branches() const noexcept { return branches_; }
  /// Seq: first component; Rec: body.
  const TypePtr& left() const noexcept { return left_; }
  /// Seq: second component.
  const TypePtr& right() const noexcept { return right_; }

  friend TypePtr make_in(std::string message);
  friend TypePtr make_out(std::string message);
  friend TypePtr make_int_choice(Branches branches);
  friend TypePtr make_ext_choice(Branches branches);
  friend TypePtr make_skip();
  friend TypePtr make_seq(TypePtr first, TypePtr second);
  friend TypePtr make_var(std::string name);
  friend TypePtr make_rec(std::string binder, TypePtr body);

 private:
  explicit SessionType(TypeKind k) : kind_(k) {}

  TypeKind kind_;
  std::string name_;
  Branches branches_;
  TypePtr left_;
  TypePtr right_;
};

TypePtr make_in(std::string message);
TypePtr make_out(std::string message);
TypePtr make_int_choice(Branches branches);
TypePtr make_ext_choice(Branches branches);
TypePtr make_skip();
TypePtr make_seq(TypePtr first, TypePtr second);
TypePtr make_var(std::string name);
TypePtr make_rec(std::string binder, TypePtr body);

/// Structural equality (binder names included).
bool equal(const TypePtr& a, const TypePtr& b);

/// Surface syntax: `?M`, `!M`, `+{l: T, ...}`, `&{l: T, ...}`, `skip`,
/// `T ; U` (right-associative), `rec x . T` (body extends maximally to the
/// right), variables, parentheses. Throws ParseError.
TypePtr parse_type(std::string_view text);
/// Prints in the surface syntax, fully parenthesised where needed.
std::string format_type(const TypePtr& t);

using TypingContext = std::set<std::string>;

bool is_terminated(const TypePtr& t);
bool is_contractive(const TypePtr& t);
bool is_type(const TypePtr& t, const TypingContext& ctx = {});
/// Why `t` is not a type under `ctx`, or nullopt when it is.
std::optional<std::string> type_error(const TypePtr& t, const TypingContext& ctx = {});

/// Number of AST nodes.
std::size_t size(const TypePtr& t);

std::set<std::string> free_variables(const TypePtr& t);
/// t[x := u], renaming binders to avoid capture.
TypePtr substitute(const TypePtr& t, const std::string& x, const TypePtr& u);

struct TypeConversion {
  Grammar grammar;
  std::vector<Word> words;
};

/// Converts closed types into words over one shared simple grammar with
/// fresh nonterminals T0, T1, ... Terminals are named `?M`, `!M`, `+l`, `&l`.
/// Throws ContractViolation for inputs that are not types.
TypeConversion to_grammar(const std::vector<TypePtr>& types);

/// word(T) ~ word(U) over their joint grammar.
BisimulationCheck check_type_equivalence(const TypePtr& t, const TypePtr& u, const DecideOptions& opts = {});
bool equivalent(const TypePtr& t, const TypePtr& u);

struct RandomTypeConfig {
  std::size_t max_depth = 4;
  std::size_t max_branches = 3;
  bool allow_empty_choice = true;
  std::vector<std::string> messages{"int", "bool"};
  std::vector<std::string> labels{"l", "m", "n"};
};

/// A random closed type (rejection-sampled until well-formed).
TypePtr random_type(std::mt19937_64& rng, const RandomTypeConfig& cfg = {});

}  // namespace simplebisim
