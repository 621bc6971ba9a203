#include "simplebisim/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "simplebisim/error.hpp"

namespace simplebisim {

namespace {

bool production_less(const Production& lhs, const Production& rhs) {
  if (lhs.label != rhs.label) return index_of(lhs.label) < index_of(rhs.label);
  return std::lexicographical_compare(
      lhs.rhs.begin(), lhs.rhs.end(), rhs.rhs.begin(), rhs.rhs.end(),
      [](Nonterminal a, Nonterminal b) { return index_of(a) < index_of(b); });
}

bool is_identifier_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_identifier_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
}

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

std::vector<Token> split_tokens(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i])) != 0) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])) == 0) ++i;
    out.push_back({std::string(line.substr(start, i - start)), start + 1});
  }
  return out;
}

void check_identifier(const Token& tok, std::size_t line) {
  bool ok = !tok.text.empty() && is_identifier_start(tok.text.front()) &&
            std::all_of(tok.text.begin(), tok.text.end(), is_identifier_char);
  if (!ok) throw ParseError("invalid identifier '" + tok.text + "'", line, tok.column);
}

}  // namespace

Word concat(const Word& lhs, const Word& rhs) {
  Word out;
  out.reserve(lhs.size() + rhs.size());
  out.insert(out.end(), lhs.begin(), lhs.end());
  out.insert(out.end(), rhs.begin(), rhs.end());
  return out;
}

Word drop(const Word& w, std::size_t n) {
  if (n >= w.size()) return {};
  return Word(w.begin() + static_cast<std::ptrdiff_t>(n), w.end());
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (Nonterminal x : w) {
    h ^= index_of(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h ^ w.size();
}

std::size_t WordPairHash::operator()(const WordPair& p) const noexcept {
  WordHash wh;
  std::size_t h = wh(p.first);
  return h ^ (wh(p.second) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

Nonterminal Grammar::intern_nonterminal(std::string_view name) {
  std::string key(name);
  if (auto it = nonterminal_ids_.find(key); it != nonterminal_ids_.end()) return it->second;
  auto id = static_cast<Nonterminal>(nonterminal_names_.size());
  nonterminal_names_.push_back(key);
  nonterminal_ids_.emplace(std::move(key), id);
  productions_.emplace_back();
  return id;
}

Terminal Grammar::intern_terminal(std::string_view name) {
  std::string key(name);
  if (auto it = terminal_ids_.find(key); it != terminal_ids_.end()) return it->second;
  auto id = static_cast<Terminal>(terminal_names_.size());
  terminal_names_.push_back(key);
  terminal_ids_.emplace(std::move(key), id);
  return id;
}

void Grammar::add_production(Nonterminal x, Terminal a, Word rhs) {
  if (index_of(x) >= nonterminal_count() || index_of(a) >= terminal_count() || !is_valid(rhs)) {
    throw ContractViolation("production mentions an unregistered symbol");
  }
  auto& prods = productions_[index_of(x)];
  Production p{a, std::move(rhs)};
  auto pos = std::lower_bound(prods.begin(), prods.end(), p, production_less);
  if (pos != prods.end() && *pos == p) return;
  bool same_label = (pos != prods.end() && pos->label == a) ||
                    (pos != prods.begin() && std::prev(pos)->label == a);
  if (same_label) simple_ = false;
  prods.insert(pos, std::move(p));
}

std::size_t Grammar::production_count() const noexcept {
  std::size_t total = 0;
  for (const auto& prods : productions_) total += prods.size();
  return total;
}

std::optional<Nonterminal> Grammar::find_nonterminal(std::string_view name) const {
  if (auto it = nonterminal_ids_.find(std::string(name)); it != nonterminal_ids_.end()) {
    return it->second;
  }
  return std::nullopt;
}

std::optional<Terminal> Grammar::find_terminal(std::string_view name) const {
  if (auto it = terminal_ids_.find(std::string(name)); it != terminal_ids_.end()) {
    return it->second;
  }
  return std::nullopt;
}

const Word* Grammar::successor(Nonterminal x, Terminal a) const {
  for (const Production& p : productions(x)) {
    if (p.label == a) return &p.rhs;
  }
  return nullptr;
}

std::vector<Terminal> Grammar::labels(Nonterminal x) const {
  std::vector<Terminal> out;
  for (const Production& p : productions(x)) {
    if (out.empty() || out.back() != p.label) out.push_back(p.label);
  }
  return out;
}

std::vector<Nonterminal> Grammar::dead_nonterminals() const {
  std::vector<Nonterminal> out;
  for (std::uint32_t i = 0; i < nonterminal_count(); ++i) {
    if (productions_[i].empty()) out.push_back(static_cast<Nonterminal>(i));
  }
  return out;
}

bool Grammar::has_dead_nonterminals() const {
  return std::any_of(productions_.begin(), productions_.end(),
                     [](const auto& prods) { return prods.empty(); });
}

std::size_t Grammar::degree() const {
  std::size_t d = 0;
  for (const auto& prods : productions_) d = std::max(d, prods.size());
  return d;
}

bool Grammar::is_valid(const Word& w) const noexcept {
  return std::all_of(w.begin(), w.end(),
                     [n = nonterminal_count()](Nonterminal x) { return index_of(x) < n; });
}

GrammarDocument parse_grammar_document(std::string_view text) {
  GrammarDocument doc;
  Grammar& g = doc.grammar;
  bool seen_production = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::vector<Token> toks = split_tokens(line);
    if (toks.empty() || toks.front().text.front() == '#') {
      if (eol == text.size()) break;
      continue;
    }
    if (toks.front().text == "%simple") {
      if (toks.size() != 1) throw ParseError("unexpected text after %simple", line_no, toks[1].column);
      if (seen_production) throw ParseError("%simple must precede all productions", line_no, 1);
      doc.declared_simple = true;
    } else if (toks.front().text == "%nonterminals" || toks.front().text == "%terminals") {
      const bool nts = toks.front().text == "%nonterminals";
      if (seen_production) throw ParseError(toks.front().text + " must precede all productions", line_no, 1);
      for (std::size_t i = 1; i < toks.size() && toks[i].text.front() != '#'; ++i) {
        check_identifier(toks[i], line_no);
        if (nts) {
          g.intern_nonterminal(toks[i].text);
        } else {
          g.intern_terminal(toks[i].text);
        }
      }
    } else {
      if (toks.size() < 3 || toks[2].text != "->") {
        std::size_t col = toks.size() < 3 ? line.size() + 1 : toks[2].column;
        throw ParseError("expected '<nonterminal> <terminal> -> <nonterminal>*'", line_no, col);
      }
      check_identifier(toks[0], line_no);
      check_identifier(toks[1], line_no);
      Nonterminal x = g.intern_nonterminal(toks[0].text);
      Terminal a = g.intern_terminal(toks[1].text);
      Word rhs;
      for (std::size_t i = 3; i < toks.size(); ++i) {
        if (toks[i].text.front() == '#') break;
        check_identifier(toks[i], line_no);
        rhs.push_back(g.intern_nonterminal(toks[i].text));
      }
      if (doc.declared_simple) {
        const Word* existing = g.successor(x, a);
        if (existing != nullptr && *existing != rhs) {
          throw DeterminismError("second production for (" + toks[0].text + ", " + toks[1].text +
                                     ") in a %simple grammar",
                                 line_no, toks[0].column);
        }
      }
      g.add_production(x, a, std::move(rhs));
      seen_production = true;
    }
    if (eol == text.size()) break;
  }
  return doc;
}

Grammar parse_grammar(std::string_view text) { return parse_grammar_document(text).grammar; }

namespace {

// Re-parsing the production lines alone interns symbols in these orders.
struct OrderCheck {
  bool nonterminals = true;
  bool terminals = true;
};

OrderCheck production_order_matches(const Grammar& g) {
  std::vector<bool> seen(g.nonterminal_count(), false), seen_t(g.terminal_count(), false);
  std::uint32_t next = 0, next_t = 0;
  OrderCheck r;
  auto visit = [&](Nonterminal x) {
    if (seen[index_of(x)]) return;
    seen[index_of(x)] = true;
    if (index_of(x) != next++) r.nonterminals = false;
  };
  for (std::uint32_t i = 0; i < g.nonterminal_count(); ++i) {
    auto x = static_cast<Nonterminal>(i);
    for (const Production& p : g.productions(x)) {
      visit(x);
      auto a = static_cast<std::uint32_t>(p.label);
      if (!seen_t[a]) {
        seen_t[a] = true;
        if (a != next_t++) r.terminals = false;
      }
      for (Nonterminal y : p.rhs) visit(y);
    }
  }
  if (next != g.nonterminal_count()) r.nonterminals = false;
  if (next_t != g.terminal_count()) r.terminals = false;
  return r;
}

}  // namespace

std::string format_grammar(const Grammar& g) {
  std::ostringstream out;
  if (g.is_simple()) out << "%simple\n";
  OrderCheck order = production_order_matches(g);
  if (!order.nonterminals) {
    out << "%nonterminals";
    for (std::uint32_t i = 0; i < g.nonterminal_count(); ++i) out << ' ' << g.name(static_cast<Nonterminal>(i));
    out << '\n';
  }
  if (!order.terminals) {
    out << "%terminals";
    for (std::uint32_t i = 0; i < g.terminal_count(); ++i) out << ' ' << g.name(static_cast<Terminal>(i));
    out << '\n';
  }
  for (std::uint32_t i = 0; i < g.nonterminal_count(); ++i) {
    auto x = static_cast<Nonterminal>(i);
    for (const Production& p : g.productions(x)) {
      out << g.name(x) << ' ' << g.name(p.label) << " ->";
      for (Nonterminal y : p.rhs) out << ' ' << g.name(y);
      out << '\n';
    }
  }
  return out.str();
}

Word parse_word(const Grammar& g, std::string_view text) {
  Word w;
  std::vector<Token> toks = split_tokens(text);
  if (toks.size() == 1 && toks.front().text == "-") return w;
  for (const Token& tok : toks) {
    auto x = g.find_nonterminal(tok.text);
    if (!x) throw ParseError("unknown nonterminal '" + tok.text + "'", 1, tok.column);
    w.push_back(*x);
  }
  return w;
}

std::string format_word(const Grammar& g, const Word& w) {
  if (w.empty()) return "-";
  std::string out;
  for (Nonterminal x : w) {
    if (!out.empty()) out += ' ';
    out += g.name(x);
  }
  return out;
}

std::vector<Transition> transitions(const Grammar& g, const Word& w) {
  std::vector<Transition> out;
  if (w.empty()) return out;
  for (const Production& p : g.productions(w.front())) {
    Word target = p.rhs;
    target.insert(target.end(), w.begin() + 1, w.end());
    out.push_back({p.label, std::move(target)});
  }
  return out;
}

std::optional<Word> run(const Grammar& g, const Word& w, std::span<const Terminal> u) {
  if (!g.is_simple()) throw ContractViolation("run requires a simple grammar");
  Word current = w;
  for (Terminal a : u) {
    if (current.empty()) return std::nullopt;
    const Word* rhs = g.successor(current.front(), a);
    if (rhs == nullptr) return std::nullopt;
    Word next = *rhs;
    next.insert(next.end(), current.begin() + 1, current.end());
    current = std::move(next);
  }
  return current;
}

DeadElimination eliminate_dead(const Grammar& g, std::vector<WordPair> pairs) {
  DeadElimination out{g, std::move(pairs), std::nullopt, std::nullopt};
  std::vector<Nonterminal> dead = g.dead_nonterminals();
  if (dead.empty()) return out;

  // Parsed identifiers never start with '_', so the fallback names are fresh.
  std::string name = "d";
  for (int attempt = 0; out.grammar.find_terminal(name); ++attempt) {
    name = attempt == 0 ? "_d" : "_d" + std::to_string(attempt);
  }
  Terminal loop = out.grammar.intern_terminal(name);
  for (Nonterminal x : dead) out.grammar.add_production(x, loop, Word{x});

  Nonterminal bottom = dead.front();
  for (auto& [lhs, rhs] : out.pairs) {
    lhs.push_back(bottom);
    rhs.push_back(bottom);
  }
  out.bottom = bottom;
  out.loop_terminal = loop;
  return out;
}

}  // namespace simplebisim
