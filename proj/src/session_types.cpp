#include "simplebisim/session_types.hpp"

#include <cctype>
#include <functional>
#include <unordered_map>

#include "simplebisim/error.hpp"

namespace simplebisim {

TypePtr make_in(std::string message) {
  auto t = std::shared_ptr<SessionType>(new SessionType(TypeKind::In));
  t->name_ = std::move(message);
  return t;
}

TypePtr make_out(std::string message) {
  auto t = std::shared_ptr<SessionType>(new SessionType(TypeKind::Out));
  t->name_ = std::move(message);
  return t;
}

TypePtr make_int_choice(Branches branches) {
  auto t = std::shared_ptr<SessionType>(new SessionType(TypeKind::IntChoice));
  t->branches_ = std::move(branches);
  return t;
}

TypePtr make_ext_choice(Branches branches) {
  auto t = std::shared_ptr<SessionType>(new SessionType(TypeKind::ExtChoice));
  t->branches_ = std::move(branches);
  return t;
}

TypePtr make_skip() {
  static const TypePtr skip(new SessionType(TypeKind::Skip));
  return skip;
}

TypePtr make_seq(TypePtr first, TypePtr second) {
  auto t = std::shared_ptr<SessionType>(new SessionType(TypeKind::Seq));
  t->left_ = std::move(first);
  t->right_ = std::move(second);
  return t;
}

TypePtr make_var(std::string name) {
  auto t = std::shared_ptr<SessionType>(new SessionType(TypeKind::Var));
  t->name_ = std::move(name);
  return t;
}

TypePtr make_rec(std::string binder, TypePtr body) {
  auto t = std::shared_ptr<SessionType>(new SessionType(TypeKind::Rec));
  t->name_ = std::move(binder);
  t->left_ = std::move(body);
  return t;
}

bool equal(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (a->kind() != b->kind() || a->name() != b->name()) return false;
  switch (a->kind()) {
    case TypeKind::IntChoice:
    case TypeKind::ExtChoice: {
      if (a->branches().size() != b->branches().size()) return false;
      auto ib = b->branches().begin();
      for (const auto& [label, body] : a->branches()) {
        if (label != ib->first || !equal(body, ib->second)) return false;
        ++ib;
      }
      return true;
    }
    case TypeKind::Seq: return equal(a->left(), b->left()) && equal(a->right(), b->right());
    case TypeKind::Rec: return equal(a->left(), b->left());
    default: return true;
  }
}

// ---------------------------------------------------------------- parsing

namespace {

class TypeParser {
 public:
  explicit TypeParser(std::string_view text) : text_(text) {}

  TypePtr parse() {
    TypePtr t = parse_seq();
    skip_space();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return t;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(what, line, col);
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
        ++pos_;
      } else if (text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip_space();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) != 0 || text_[pos_] == '_')) {
      ++pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0 ||
                                     text_[pos_] == '_' || text_[pos_] == '\'')) {
        ++pos_;
      }
    }
    if (start == pos_) error("expected an identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  TypePtr parse_seq() {
    TypePtr first = parse_atom();
    if (accept(';')) return make_seq(std::move(first), parse_seq());
    return first;
  }

  Branches parse_branches() {
    expect('{');
    Branches out;
    if (accept('}')) return out;
    do {
      std::size_t at = pos_;
      std::string label = identifier();
      expect(':');
      TypePtr body = parse_seq();
      if (!out.emplace(label, std::move(body)).second) {
        pos_ = at;
        skip_space();
        error("duplicate label '" + label + "'");
      }
    } while (accept(','));
    expect('}');
    return out;
  }

  TypePtr parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) error("unexpected end of input");
    char c = text_[pos_];
    switch (c) {
      case '?': ++pos_; return make_in(identifier());
      case '!': ++pos_; return make_out(identifier());
      case '+': ++pos_; return make_int_choice(parse_branches());
      case '&': ++pos_; return make_ext_choice(parse_branches());
      case '(': {
        ++pos_;
        TypePtr t = parse_seq();
        expect(')');
        return t;
      }
      default: break;
    }
    std::size_t at = pos_;
    std::string word = identifier();
    if (word == "skip") return make_skip();
    if (word == "rec") {
      std::string binder = identifier();
      if (binder == "skip" || binder == "rec") {
        pos_ = at;
        error("reserved word used as a variable");
      }
      expect('.');
      return make_rec(std::move(binder), parse_seq());
    }
    return make_var(std::move(word));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

TypePtr parse_type(std::string_view text) { return TypeParser(text).parse(); }

std::string format_type(const TypePtr& t) {
  switch (t->kind()) {
    case TypeKind::In: return "?" + t->name();
    case TypeKind::Out: return "!" + t->name();
    case TypeKind::IntChoice:
    case TypeKind::ExtChoice: {
      std::string out = t->kind() == TypeKind::IntChoice ? "+{" : "&{";
      bool first = true;
      for (const auto& [label, body] : t->branches()) {
        if (!first) out += ", ";
        first = false;
        out += label + ": " + format_type(body);
      }
      return out + "}";
    }
    case TypeKind::Skip: return "skip";
    case TypeKind::Seq: {
      // Sequencing is right-associative and a rec body extends to the right,
      // so only a left operand that is a Seq or a Rec needs parentheses.
      std::string lhs = format_type(t->left());
      if (t->left()->kind() == TypeKind::Seq || t->left()->kind() == TypeKind::Rec) lhs = "(" + lhs + ")";
      return lhs + " ; " + format_type(t->right());
    }
    case TypeKind::Var: return t->name();
    case TypeKind::Rec: return "rec " + t->name() + " . " + format_type(t->left());
  }
  return "?";
}

// ---------------------------------------------------------- predicates

bool is_terminated(const TypePtr& t) {
  switch (t->kind()) {
    case TypeKind::Skip: return true;
    case TypeKind::Seq: return is_terminated(t->left()) && is_terminated(t->right());
    case TypeKind::Rec: return is_terminated(t->left());
    default: return false;
  }
}

bool is_contractive(const TypePtr& t) {
  switch (t->kind()) {
    case TypeKind::In:
    case TypeKind::Out:
    case TypeKind::IntChoice:
    case TypeKind::ExtChoice:
    case TypeKind::Skip: return true;
    case TypeKind::Seq:
      if (is_terminated(t->left())) return is_contractive(t->right());
      return is_contractive(t->left());
    case TypeKind::Rec: return is_contractive(t->left());
    case TypeKind::Var: return false;
  }
  return false;
}

std::optional<std::string> type_error(const TypePtr& t, const TypingContext& ctx) {
  switch (t->kind()) {
    case TypeKind::In:
    case TypeKind::Out:
    case TypeKind::Skip: return std::nullopt;
    case TypeKind::IntChoice:
    case TypeKind::ExtChoice:
      for (const auto& [label, body] : t->branches()) {
        if (auto e = type_error(body, ctx)) return e;
      }
      return std::nullopt;
    case TypeKind::Seq:
      if (auto e = type_error(t->left(), ctx)) return e;
      return type_error(t->right(), ctx);
    case TypeKind::Var:
      if (ctx.count(t->name()) == 0) return "free variable '" + t->name() + "'";
      return std::nullopt;
    case TypeKind::Rec: {
      if (!is_contractive(t)) return "not contractive: " + format_type(t);
      TypingContext inner = ctx;
      inner.insert(t->name());
      return type_error(t->left(), inner);
    }
  }
  return std::nullopt;
}

bool is_type(const TypePtr& t, const TypingContext& ctx) { return !type_error(t, ctx).has_value(); }

std::size_t size(const TypePtr& t) {
  switch (t->kind()) {
    case TypeKind::IntChoice:
    case TypeKind::ExtChoice: {
      std::size_t n = 1;
      for (const auto& [label, body] : t->branches()) n += size(body);
      return n;
    }
    case TypeKind::Seq: return 1 + size(t->left()) + size(t->right());
    case TypeKind::Rec: return 1 + size(t->left());
    default: return 1;
  }
}

// -------------------------------------------------------- substitution

std::set<std::string> free_variables(const TypePtr& t) {
  std::set<std::string> out;
  std::function<void(const TypePtr&, std::set<std::string>&)> walk = [&](const TypePtr& u,
                                                                         std::set<std::string>& bound) {
    switch (u->kind()) {
      case TypeKind::Var:
        if (bound.count(u->name()) == 0) out.insert(u->name());
        break;
      case TypeKind::IntChoice:
      case TypeKind::ExtChoice:
        for (const auto& [label, body] : u->branches()) walk(body, bound);
        break;
      case TypeKind::Seq:
        walk(u->left(), bound);
        walk(u->right(), bound);
        break;
      case TypeKind::Rec: {
        bool added = bound.insert(u->name()).second;
        walk(u->left(), bound);
        if (added) bound.erase(u->name());
        break;
      }
      default: break;
    }
  };
  std::set<std::string> bound;
  walk(t, bound);
  return out;
}

TypePtr substitute(const TypePtr& t, const std::string& x, const TypePtr& u) {
  switch (t->kind()) {
    case TypeKind::Var: return t->name() == x ? u : t;
    case TypeKind::IntChoice:
    case TypeKind::ExtChoice: {
      Branches out;
      for (const auto& [label, body] : t->branches()) out.emplace(label, substitute(body, x, u));
      return t->kind() == TypeKind::IntChoice ? make_int_choice(std::move(out)) : make_ext_choice(std::move(out));
    }
    case TypeKind::Seq: return make_seq(substitute(t->left(), x, u), substitute(t->right(), x, u));
    case TypeKind::Rec: {
      if (t->name() == x) return t;
      std::set<std::string> fv_u = free_variables(u);
      if (fv_u.count(t->name()) == 0) return make_rec(t->name(), substitute(t->left(), x, u));
      std::set<std::string> avoid = fv_u;
      avoid.merge(free_variables(t->left()));
      avoid.insert(x);
      std::string fresh = t->name();
      for (int i = 1; avoid.count(fresh) != 0; ++i) fresh = t->name() + "_" + std::to_string(i);
      TypePtr body = substitute(t->left(), t->name(), make_var(fresh));
      return make_rec(fresh, substitute(body, x, u));
    }
    default: return t;
  }
}

// ---------------------------------------------------------- conversion

namespace {

class Converter {
 public:
  Word word(const TypePtr& t, std::unordered_map<std::string, Nonterminal>& env) {
    switch (t->kind()) {
      case TypeKind::In:
      case TypeKind::Out: {
        Nonterminal x = fresh();
        Terminal a = g_.intern_terminal((t->kind() == TypeKind::In ? "?" : "!") + t->name());
        g_.add_production(x, a, {});
        return {x};
      }
      case TypeKind::IntChoice:
      case TypeKind::ExtChoice: {
        Nonterminal x = fresh();
        const char* tag = t->kind() == TypeKind::IntChoice ? "+" : "&";
        for (const auto& [label, body] : t->branches()) {
          Word w = word(body, env);
          g_.add_production(x, g_.intern_terminal(tag + label), std::move(w));
        }
        return {x};
      }
      case TypeKind::Skip: return {};
      case TypeKind::Seq: return concat(word(t->left(), env), word(t->right(), env));
      case TypeKind::Var: {
        auto it = env.find(t->name());
        if (it == env.end()) throw ContractViolation("free variable '" + t->name() + "'");
        return {it->second};
      }
      case TypeKind::Rec: {
        if (is_terminated(t)) return {};
        Nonterminal x = fresh();
        std::optional<Nonterminal> shadowed;
        if (auto it = env.find(t->name()); it != env.end()) shadowed = it->second;
        env[t->name()] = x;
        Word body = word(t->left(), env);
        if (shadowed) {
          env[t->name()] = *shadowed;
        } else {
          env.erase(t->name());
        }
        if (body.empty()) throw ContractViolation("recursive type with an empty body word");
        Nonterminal y = body.front();
        if (y == x) throw ContractViolation("recursive type unguarded in its own variable");
        Word delta = drop(body, 1);
        std::vector<Production> copy(g_.productions(y).begin(), g_.productions(y).end());
        for (const Production& p : copy) g_.add_production(x, p.label, concat(p.rhs, delta));
        return {x};
      }
    }
    return {};
  }

  Grammar take() { return std::move(g_); }

 private:
  Nonterminal fresh() { return g_.intern_nonterminal("T" + std::to_string(counter_++)); }

  Grammar g_;
  std::size_t counter_ = 0;
};

}  // namespace

TypeConversion to_grammar(const std::vector<TypePtr>& types) {
  for (const TypePtr& t : types) {
    if (auto e = type_error(t)) throw ContractViolation("not a type: " + *e);
  }
  Converter conv;
  TypeConversion out;
  for (const TypePtr& t : types) {
    std::unordered_map<std::string, Nonterminal> env;
    out.words.push_back(conv.word(t, env));
  }
  out.grammar = conv.take();
  return out;
}

BisimulationCheck check_type_equivalence(const TypePtr& t, const TypePtr& u, const DecideOptions& opts) {
  TypeConversion conv = to_grammar({t, u});
  return check_bisimilar(conv.grammar, conv.words[0], conv.words[1], opts);
}

bool equivalent(const TypePtr& t, const TypePtr& u) {
  return check_type_equivalence(t, u).decision.answer == Answer::Bisimilar;
}

// ---------------------------------------------------------- generation

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

TypePtr generate(std::mt19937_64& rng, const RandomTypeConfig& cfg, std::size_t depth,
                 std::vector<std::string>& vars, std::size_t& binder_counter) {
  enum { In, Out, Skip, Var, Choice, Seq, Rec };
  std::vector<int> options{In, Out, Skip};
  if (!vars.empty()) options.push_back(Var);
  if (depth > 0) {
    options.insert(options.end(), {Choice, Choice, Seq, Seq, Seq, Rec, Rec});
  } else if (cfg.allow_empty_choice) {
    options.push_back(Choice);
  }
  switch (options[pick(rng, options.size())]) {
    case In: return make_in(cfg.messages[pick(rng, cfg.messages.size())]);
    case Out: return make_out(cfg.messages[pick(rng, cfg.messages.size())]);
    case Skip: return make_skip();
    case Var: return make_var(vars[pick(rng, vars.size())]);
    case Choice: {
      std::size_t lo = cfg.allow_empty_choice ? 0 : 1;
      std::size_t count = depth == 0 ? 0 : lo + pick(rng, cfg.max_branches - lo + 1);
      Branches branches;
      for (std::size_t i = 0; i < count && i < cfg.labels.size(); ++i) {
        branches.emplace(cfg.labels[i], generate(rng, cfg, depth - 1, vars, binder_counter));
      }
      return pick(rng, 2) == 0 ? make_int_choice(std::move(branches)) : make_ext_choice(std::move(branches));
    }
    case Seq: {
      TypePtr a = generate(rng, cfg, depth - 1, vars, binder_counter);
      TypePtr b = generate(rng, cfg, depth - 1, vars, binder_counter);
      return make_seq(std::move(a), std::move(b));
    }
    default: {
      std::string binder = "x" + std::to_string(binder_counter++);
      vars.push_back(binder);
      TypePtr body = generate(rng, cfg, depth - 1, vars, binder_counter);
      vars.pop_back();
      return make_rec(std::move(binder), std::move(body));
    }
  }
}

}  // namespace

TypePtr random_type(std::mt19937_64& rng, const RandomTypeConfig& cfg) {
  while (true) {
    std::vector<std::string> vars;
    std::size_t binders = 0;
    TypePtr t = generate(rng, cfg, cfg.max_depth, vars, binders);
    if (is_type(t)) return t;
  }
}

}  // namespace simplebisim
