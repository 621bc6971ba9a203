#include "simplebisim/congruence.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "simplebisim/error.hpp"

namespace simplebisim {

namespace {

bool index_less(const Word& a, const Word& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](Nonterminal x, Nonterminal y) { return index_of(x) < index_of(y); });
}

// Orientation-insensitive key of a pair.
WordPair unordered(const Word& a, const Word& b) {
  if (index_less(b, a)) return {b, a};
  return {a, b};
}

// Reads a pair as (X, Y beta) when one side is a single symbol.
std::optional<std::pair<Nonterminal, const Word*>> as_bpa1_shape(const BasisPair& p) {
  if (p.lhs.size() == 1) return std::make_pair(p.lhs.front(), &p.rhs);
  if (p.rhs.size() == 1) return std::make_pair(p.rhs.front(), &p.lhs);
  return std::nullopt;
}

}  // namespace

Basis Basis::reflexive(const Grammar& g) {
  Basis b;
  for (std::uint32_t i = 0; i < g.nonterminal_count(); ++i) {
    auto x = static_cast<Nonterminal>(i);
    b.add(Word{x}, Word{x});
  }
  return b;
}

Basis::HeadKey Basis::key(Nonterminal x, Nonterminal y) {
  auto a = index_of(x);
  auto c = index_of(y);
  return a <= c ? HeadKey{a, c} : HeadKey{c, a};
}

void Basis::add(Word lhs, Word rhs) {
  if (lhs.empty() || rhs.empty()) throw ContractViolation("basis pairs must have nonempty words");
  if (contains(lhs, rhs)) return;
  index_[key(lhs.front(), rhs.front())].push_back({std::move(lhs), std::move(rhs)});
}

std::size_t Basis::remove(Nonterminal x, Nonterminal y) {
  auto it = index_.find(key(x, y));
  if (it == index_.end()) return 0;
  std::size_t n = it->second.size();
  index_.erase(it);
  return n;
}

bool Basis::erase(const BasisPair& p) {
  if (p.lhs.empty() || p.rhs.empty()) return false;
  auto it = index_.find(key(p.lhs.front(), p.rhs.front()));
  if (it == index_.end()) return false;
  auto& bucket = it->second;
  auto pos = std::find_if(bucket.begin(), bucket.end(), [&p](const BasisPair& q) {
    return q == p || (q.lhs == p.rhs && q.rhs == p.lhs);
  });
  if (pos == bucket.end()) return false;
  bucket.erase(pos);
  if (bucket.empty()) index_.erase(it);
  return true;
}

const BasisPair* Basis::find(Nonterminal x, Nonterminal y) const {
  auto it = index_.find(key(x, y));
  return it == index_.end() ? nullptr : &it->second.front();
}

bool Basis::contains(const Word& lhs, const Word& rhs) const {
  if (lhs.empty() || rhs.empty()) return false;
  auto it = index_.find(key(lhs.front(), rhs.front()));
  if (it == index_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const BasisPair& q) {
    return (q.lhs == lhs && q.rhs == rhs) || (q.lhs == rhs && q.rhs == lhs);
  });
}

std::size_t Basis::size() const noexcept {
  std::size_t n = 0;
  for (const auto& [k, bucket] : index_) n += bucket.size();
  return n;
}

std::vector<BasisPair> Basis::pairs() const {
  std::vector<BasisPair> out;
  for (const auto& [k, bucket] : index_) out.insert(out.end(), bucket.begin(), bucket.end());
  return out;
}

std::size_t Basis::max_word_length() const {
  std::size_t n = 0;
  for (const auto& [k, bucket] : index_) {
    for (const BasisPair& p : bucket) n = std::max({n, p.lhs.size(), p.rhs.size()});
  }
  return n;
}

Basis parse_basis(const Grammar& g, std::string_view text) {
  Basis b;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    auto sep = line.find("==");
    if (sep == std::string_view::npos) throw ParseError("expected '<word> == <word>'", line_no, first + 1);
    auto parse_side = [&](std::string_view side, std::size_t offset) {
      try {
        return parse_word(g, side);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no, offset + e.column());
      }
    };
    Word lhs = parse_side(line.substr(0, sep), 0);
    Word rhs = parse_side(line.substr(sep + 2), sep + 2);
    if (lhs.empty() || rhs.empty()) throw ParseError("basis words must be nonempty", line_no, first + 1);
    b.add(std::move(lhs), std::move(rhs));
  }
  return b;
}

std::string format_basis(const Grammar& g, const Basis& b) {
  std::ostringstream out;
  for (const BasisPair& p : b.pairs()) out << format_word(g, p.lhs) << " == " << format_word(g, p.rhs) << '\n';
  return out.str();
}

BasisPredicates check_basis_predicates(const Basis& b, const NormTable& t) {
  BasisPredicates r;
  r.reflexive = true;
  for (std::uint32_t i = 0; i < t.size(); ++i) {
    auto x = static_cast<Nonterminal>(i);
    if (!b.contains(Word{x}, Word{x})) {
      r.reflexive = false;
      break;
    }
  }

  std::map<Basis::HeadKey, std::size_t> per_key;
  r.simple = true;
  r.functional = true;
  r.norm_compliant = true;
  for (const BasisPair& p : b.pairs()) {
    if (++per_key[Basis::key(p.lhs.front(), p.rhs.front())] > 1) r.simple = false;
    if (auto shape = as_bpa1_shape(p)) {
      auto [x, yb] = *shape;
      ExtendedNat nx = t.norm(x);
      if (nx.is_finite()) {
        ExtendedNat ny = t.norm(yb->front());
        bool ok = ny.is_finite() && nx >= ny &&
                  norm_dynamic(t, Word{x}, ny.value()) == drop(*yb, 1);
        if (!ok) r.functional = false;
      } else if (t.is_normed(*yb)) {
        r.norm_compliant = false;
      }
    } else if (t.is_normed(p.lhs) || t.is_normed(p.rhs)) {
      r.norm_compliant = false;
    }
  }
  return r;
}

const char* to_string(ProofRule r) {
  switch (r) {
    case ProofRule::EpsAxiom: return "eps-ax";
    case ProofRule::Bpa1L: return "BPA1-L";
    case ProofRule::Bpa1R: return "BPA1-R";
    case ProofRule::Bpa2L: return "BPA2-L";
    case ProofRule::Bpa2R: return "BPA2-R";
    case ProofRule::Revisit: return "revisit";
    case ProofRule::Stuck: return "stuck";
    case ProofRule::Ancestor: return "ancestor";
  }
  return "?";
}

namespace {

enum class PairStatus : std::uint8_t { InProgress, Proved };

struct RuleApplication {
  ProofRule rule;
  std::vector<WordPair> children;
};

std::optional<RuleApplication> apply_rule(const Basis& b, const Word& gamma, const Word& delta) {
  if (gamma.empty() && delta.empty()) return RuleApplication{ProofRule::EpsAxiom, {}};
  if (gamma.empty() || delta.empty()) return std::nullopt;
  const BasisPair* p = b.find(gamma.front(), delta.front());
  if (p == nullptr) return std::nullopt;

  bool left = p->lhs.front() == gamma.front() && p->rhs.front() == delta.front();
  const Word& x_side = left ? gamma : delta;
  const Word& y_side = left ? delta : gamma;
  Word alpha_tail = drop(x_side, 1);
  Word beta_tail = drop(y_side, 1);
  auto orient = [left](Word a, Word c) { return left ? WordPair{std::move(a), std::move(c)} : WordPair{std::move(c), std::move(a)}; };

  RuleApplication out;
  if (p->lhs.size() == 1) {
    out.rule = left ? ProofRule::Bpa1L : ProofRule::Bpa1R;
    out.children.push_back(orient(concat(drop(p->rhs, 1), alpha_tail), beta_tail));
  } else {
    out.rule = left ? ProofRule::Bpa2L : ProofRule::Bpa2R;
    out.children.push_back(orient(drop(p->lhs, 1), alpha_tail));
    out.children.push_back(orient(drop(p->rhs, 1), beta_tail));
  }
  return out;
}

void set_counts(CongruenceVerdict& v, const std::unordered_map<WordPair, PairStatus, WordPairHash>& status) {
  v.distinct_pairs = status.size();
  v.expanded_pairs = status.size() - status.count(WordPair{});
}

CongruenceVerdict search(const Basis& b, const Grammar& g, const NormTable& t, const Word& gamma,
                         const Word& delta, bool inductive) {
  if (!g.is_simple()) throw ContractViolation("congruence requires a simple grammar");
  BasisPredicates preds = check_basis_predicates(b, t);
  if (!preds.simple) throw ContractViolation("congruence requires a simple basis");
  if (!preds.functional) throw ContractViolation("congruence requires a functional basis");

  CongruenceVerdict v;
  std::unordered_map<WordPair, PairStatus, WordPairHash> status;
  std::vector<std::size_t> parent;

  struct Frame {
    std::size_t node;
    std::vector<WordPair> pending;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;

  auto new_node = [&](WordPair pair, std::size_t from) {
    v.nodes.push_back({std::move(pair), ProofRule::Stuck, {}});
    parent.push_back(from);
    return v.nodes.size() - 1;
  };
  auto refute = [&](std::size_t id) {
    for (std::size_t cur = id;; cur = parent[cur]) {
      v.refutation_path.push_back(cur);
      if (cur == 0) break;
    }
    std::reverse(v.refutation_path.begin(), v.refutation_path.end());
    v.congruent = false;
    set_counts(v, status);
    return v;
  };

  // Returns false when the node refutes the goal.
  auto visit = [&](std::size_t id) {
    ProofNode& node = v.nodes[id];
    WordPair k = unordered(node.pair.first, node.pair.second);
    if (auto it = status.find(k); it != status.end()) {
      if (inductive && it->second == PairStatus::InProgress) {
        node.rule = ProofRule::Ancestor;
        return false;
      }
      node.rule = ProofRule::Revisit;
      return true;
    }
    auto app = apply_rule(b, node.pair.first, node.pair.second);
    if (!app) {
      node.rule = ProofRule::Stuck;
      return false;
    }
    node.rule = app->rule;
    if (app->children.empty()) {
      status.emplace(std::move(k), PairStatus::Proved);
      return true;
    }
    status.emplace(std::move(k), PairStatus::InProgress);
    stack.push_back({id, std::move(app->children)});
    return true;
  };

  std::size_t root = new_node({gamma, delta}, 0);
  if (!visit(root)) return refute(root);
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.pending.size()) {
      const ProofNode& done = v.nodes[top.node];
      status[unordered(done.pair.first, done.pair.second)] = PairStatus::Proved;
      stack.pop_back();
      continue;
    }
    std::size_t from = top.node;
    WordPair pair = std::move(top.pending[top.next++]);
    std::size_t id = new_node(std::move(pair), from);
    v.nodes[from].children.push_back(id);
    if (!visit(id)) return refute(id);
  }
  v.congruent = true;
  set_counts(v, status);
  return v;
}

}  // namespace

CongruenceVerdict decide_coinductive(const Basis& b, const Grammar& g, const NormTable& t,
                                     const Word& gamma, const Word& delta) {
  return search(b, g, t, gamma, delta, false);
}

CongruenceVerdict decide_inductive(const Basis& b, const Grammar& g, const NormTable& t,
                                   const Word& gamma, const Word& delta) {
  return search(b, g, t, gamma, delta, true);
}

SelfBisimulationReport check_self_bisimulation(const Basis& b, const Grammar& g, const NormTable& t) {
  SelfBisimulationReport report;
  for (const BasisPair& p : b.pairs()) {
    for (std::uint32_t i = 0; i < g.terminal_count(); ++i) {
      auto a = static_cast<Terminal>(i);
      const Terminal u[] = {a};
      auto l = run(g, p.lhs, u);
      auto r = run(g, p.rhs, u);
      if (!l && !r) continue;
      if (l) l = prune(t, *l);
      if (r) r = prune(t, *r);
      if (!l || !r || !decide_coinductive(b, g, t, *l, *r).congruent) {
        report.ok = false;
        report.failures.push_back({p, a, l, r});
      }
    }
  }
  return report;
}

}  // namespace simplebisim
