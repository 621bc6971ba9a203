#include "simplebisim/basis_updating.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "simplebisim/error.hpp"

namespace simplebisim {

const char* to_string(NodeMark m) {
  switch (m) {
    case NodeMark::Unfinished: return "unfinished";
    case NodeMark::Loop: return "loop";
    case NodeMark::Refl: return "refl";
    case NodeMark::Unmarked: return "none";
    case NodeMark::Bpa1Guess: return "BPA1";
    case NodeMark::Bpa2Guess: return "BPA2";
    case NodeMark::PartialFailure: return "pFail";
    case NodeMark::TotalFailure: return "tFail";
  }
  return "?";
}

const char* to_string(EdgeKind e) {
  switch (e) {
    case EdgeKind::Root: return "root";
    case EdgeKind::Transition: return "transition";
    case EdgeKind::Bpa1: return "BPA1";
    case EdgeKind::Bpa2: return "BPA2";
  }
  return "?";
}

const char* to_string(Answer a) { return a == Answer::Bisimilar ? "bisimilar" : "not-bisimilar"; }

std::uint64_t budget_valuation(const Grammar& g, const NormTable& t, const Word& gamma, const Word& delta) {
  return std::max<std::uint64_t>({valuation(t, g), seminorm(t, gamma), seminorm(t, delta), 1});
}

namespace {

constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

struct Node {
  WordPair pair;  // caller orientation
  bool swapped = false;  // normalized form is (pair.second, pair.first)
  NodeMark mark = NodeMark::Unfinished;
  EdgeKind edge = EdgeKind::Root;
  Terminal label{};
  std::size_t parent = kNoParent;
  std::vector<std::size_t> children;
  std::optional<BasisPair> introduced;
  std::uint64_t step = 0;
  bool counted = false;  // present in the visited multiset
  bool alive = true;
};

enum class Outcome { Continue, TotalFailure };

class Run {
 public:
  Run(const Grammar& g, const NormTable& t, const DecideOptions& opts)
      : g_(g), t_(t), opts_(opts), basis_(Basis::reflexive(g)) {}

  Decision go(const Word& gamma, const Word& delta) {
    Word g0 = prune(t_, gamma);
    Word d0 = prune(t_, delta);
    const long double n = static_cast<long double>(std::max<std::size_t>(g_.nonterminal_count(), 1));
    const long double d = static_cast<long double>(std::max<std::size_t>(g_.degree(), 1));
    const long double v = static_cast<long double>(budget_valuation(g_, t_, g0, d0));
    stats_.iteration_budget = std::pow(n, 12.0L) * d * d * v * v;
    stats_.change_budget = std::pow(n, 4.0L);

    std::size_t root = make_node(std::move(g0), std::move(d0), kNoParent, EdgeKind::Root, Terminal{});
    stack_.push_back(root);

    Decision out;
    bool failed = false;
    while (true) {
      std::size_t leaf = next_leaf();
      if (leaf == kNoParent) break;
      ++stats_.iterations;
      if (expand(leaf) == Outcome::TotalFailure) {
        failed = true;
        break;
      }
      check_budget();
    }

    out.answer = failed ? Answer::NotBisimilar : Answer::Bisimilar;
    if (failed) {
      out.total_failure = failure_at_;
      out.failure_chain = failure_chain_;
    }
    out.basis = basis_;
    out.s_set.assign(s_.begin(), s_.end());
    for (const Node& node : nodes_) {
      if (node.alive) out.tree_pairs.push_back(node.pair);
    }
    out.stats = stats_;
    if (opts_.trace) {
      snapshot("final");
      out.phases = std::move(phases_);
      out.events = std::move(events_);
    }
    return out;
  }

 private:
  WordPair normalized(const Node& node) const {
    return node.swapped ? WordPair{node.pair.second, node.pair.first} : node.pair;
  }

  std::size_t make_node(Word lhs, Word rhs, std::size_t parent, EdgeKind edge, Terminal label) {
    Node node;
    node.swapped = t_.word_less(lhs, rhs);
    stats_.peak_seminorm = std::max({stats_.peak_seminorm, seminorm(t_, lhs), seminorm(t_, rhs)});
    node.pair = {std::move(lhs), std::move(rhs)};
    node.edge = edge;
    node.label = label;
    node.parent = parent;
    nodes_.push_back(std::move(node));
    std::size_t id = nodes_.size() - 1;
    if (parent != kNoParent) nodes_[parent].children.push_back(id);
    return id;
  }

  // Adds children given in the parent's normalized orientation. BPA2 rule
  // children are (basis tail, leaf tail) per side, so under a flip they swap
  // places instead of sides.
  void add_children(std::size_t parent, std::vector<std::tuple<Word, Word, EdgeKind, Terminal>> kids) {
    bool flip = nodes_[parent].swapped;
    bool rule2 = !kids.empty() && std::get<2>(kids.front()) == EdgeKind::Bpa2;
    if (flip && rule2) std::reverse(kids.begin(), kids.end());
    std::vector<std::size_t> ids;
    for (auto& [a, b, edge, label] : kids) {
      ids.push_back(flip && !rule2 ? make_node(std::move(b), std::move(a), parent, edge, label)
                                   : make_node(std::move(a), std::move(b), parent, edge, label));
    }
    for (auto it = ids.rbegin(); it != ids.rend(); ++it) stack_.push_back(*it);
  }

  std::size_t next_leaf() {
    while (!stack_.empty()) {
      std::size_t id = stack_.back();
      stack_.pop_back();
      if (nodes_[id].alive && nodes_[id].mark == NodeMark::Unfinished) return id;
    }
    return kNoParent;
  }

  void count_visited(std::size_t id) {
    Node& node = nodes_[id];
    if (node.counted) return;
    node.counted = true;
    ++visited_[normalized(node)];
  }

  void uncount_visited(std::size_t id) {
    Node& node = nodes_[id];
    if (!node.counted) return;
    node.counted = false;
    auto it = visited_.find(normalized(node));
    if (--it->second == 0) visited_.erase(it);
  }

  static NonterminalPair s_key(Nonterminal x, Nonterminal y) {
    return index_of(x) <= index_of(y) ? NonterminalPair{x, y} : NonterminalPair{y, x};
  }

  bool add_to_s(Nonterminal x, Nonterminal y, TraceEvent& ev) {
    auto key = s_key(x, y);
    if (!s_.insert(key).second) return false;
    ev.s_added.push_back(key);
    return true;
  }

  void basis_add(std::size_t owner, Word lhs, Word rhs, TraceEvent& ev) {
    BasisPair p{std::move(lhs), std::move(rhs)};
    basis_.add(p.lhs, p.rhs);
    ev.basis_added.push_back(p);
    nodes_[owner].introduced = std::move(p);
  }

  void basis_remove(std::size_t owner, TraceEvent& ev) {
    auto& introduced = nodes_[owner].introduced;
    if (!introduced) return;
    if (basis_.erase(*introduced)) ev.basis_removed.push_back(*introduced);
    introduced.reset();
  }

  struct Matching {
    Terminal label;
    const Word* lhs;
    const Word* rhs;
  };

  // Matching transitions of two heads with equal label sets, in terminal order.
  std::vector<Matching> matching(Nonterminal x, Nonterminal y) const {
    std::vector<Matching> out;
    auto px = g_.productions(x);
    auto py = g_.productions(y);
    for (std::size_t i = 0; i < px.size(); ++i) out.push_back({px[i].label, &px[i].rhs, &py[i].rhs});
    return out;
  }

  Outcome expand(std::size_t id) {
    nodes_[id].step = stats_.iterations;
    auto [lhs, rhs] = normalized(nodes_[id]);
    TraceEvent ev;
    ev.step = stats_.iterations;
    ev.pair = nodes_[id].pair;

    auto finish = [&](NodeMark mark, const char* kind) {
      nodes_[id].mark = mark;
      count_visited(id);
      ev.kind = kind;
      record(std::move(ev));
      return Outcome::Continue;
    };
    auto internal = [&](NodeMark mark, const char* kind,
                        std::vector<std::tuple<Word, Word, EdgeKind, Terminal>> kids) {
      nodes_[id].mark = mark;
      count_visited(id);
      ev.kind = kind;
      if (!ev.basis_added.empty()) ++stats_.basis_changes;
      record(std::move(ev));
      add_children(id, std::move(kids));
      return Outcome::Continue;
    };
    auto fail = [&](const char* kind) {
      ev.kind = kind;
      record(std::move(ev));
      return partial_failure(id);
    };

    // Already visited.
    if (visited_.count({lhs, rhs}) != 0) return finish(NodeMark::Loop, "loop");
    // Identical words.
    if (lhs == rhs) return finish(NodeMark::Refl, "refl");
    // The normalized order puts the empty word second.
    if (rhs.empty()) return fail("empty-vs-nonempty");

    const Nonterminal x = lhs.front();
    const Nonterminal y = rhs.front();
    const Word alpha1 = drop(lhs, 1);
    const Word beta1 = drop(rhs, 1);

    if (const BasisPair* bp = basis_.find(x, y)) {
      // Stored pairs share the normalized orientation of their head key.
      if (bp->lhs.front() != x) throw std::logic_error("basis pair orientation mismatch");
      if (bp->lhs.size() == 1) {
        // Single-symbol pair in the basis.
        return internal(NodeMark::Unmarked, "bpa1",
                        {{prune(t_, concat(drop(bp->rhs, 1), alpha1)), beta1, EdgeKind::Bpa1, Terminal{}}});
      }
      // Longer pair in the basis.
      return internal(NodeMark::Unmarked, "bpa2",
                      {{drop(bp->lhs, 1), alpha1, EdgeKind::Bpa2, Terminal{}},
                       {drop(bp->rhs, 1), beta1, EdgeKind::Bpa2, Terminal{}}});
    }

    if (g_.labels(x) != g_.labels(y)) {
      nodes_[id].mark = NodeMark::TotalFailure;
      ev.kind = "total-failure";
      record(std::move(ev));
      failure_at_ = nodes_[id].pair;
      failure_chain_.clear();
      return Outcome::TotalFailure;
    }

    const bool x_normed = t_.is_normed(x);
    const bool y_normed = t_.is_normed(y);
    std::vector<std::tuple<Word, Word, EdgeKind, Terminal>> kids;

    if (!x_normed && !y_normed) {
      basis_add(id, Word{x}, Word{y}, ev);
      for (const Matching& m : matching(x, y)) {
        kids.emplace_back(prune(t_, *m.lhs), prune(t_, *m.rhs), EdgeKind::Transition, m.label);
      }
      return internal(NodeMark::Bpa1Guess, "unnormed-unnormed", std::move(kids));
    }

    if (!x_normed) {
      // y normed; x unnormed so alpha1 is empty
      if (t_.is_normed(rhs)) return fail("unnormed-normed-fail");
      basis_add(id, Word{x}, rhs, ev);
      for (const Matching& m : matching(x, y)) {
        kids.emplace_back(prune(t_, *m.lhs), prune(t_, concat(*m.rhs, beta1)), EdgeKind::Transition, m.label);
      }
      return internal(NodeMark::Bpa1Guess, "unnormed-normed", std::move(kids));
    }

    // Both normed, norm(x) >= norm(y).
    const std::uint64_t ny = t_.norm(y).value();
    const std::vector<Terminal> u = canonical_word(t_, y);
    const Word beta = norm_dynamic(t_, Word{x}, ny);
    const bool in_s = s_.count(s_key(x, y)) != 0;
    if (!in_s) {
      auto reached = run(g_, Word{x}, u);
      if (reached && *reached == beta) {
        basis_add(id, Word{x}, concat(Word{y}, beta), ev);
        for (const Matching& m : matching(x, y)) {
          kids.emplace_back(prune(t_, *m.lhs), prune(t_, concat(*m.rhs, beta)), EdgeKind::Transition, m.label);
        }
        kids.emplace_back(prune(t_, concat(beta, alpha1)), beta1, EdgeKind::Bpa1, Terminal{});
        return internal(NodeMark::Bpa1Guess, "normed-normed-bpa1", std::move(kids));
      }
    }
    if (!t_.is_normed(lhs) && !t_.is_normed(rhs)) {
      basis_add(id, lhs, rhs, ev);
      add_to_s(x, y, ev);
      for (const Matching& m : matching(x, y)) {
        kids.emplace_back(prune(t_, concat(*m.lhs, alpha1)), prune(t_, concat(*m.rhs, beta1)),
                          EdgeKind::Transition, m.label);
      }
      return internal(NodeMark::Bpa2Guess, "normed-normed-bpa2", std::move(kids));
    }
    add_to_s(x, y, ev);
    return fail("normed-normed-fail");
  }

  Outcome partial_failure(std::size_t origin) {
    ++stats_.partial_failures;
    ++stats_.basis_changes;
    nodes_[origin].mark = NodeMark::PartialFailure;
    failure_chain_.clear();
    const std::size_t s_before = s_.size();

    std::size_t cur = origin;
    while (true) {
      failure_chain_.push_back(nodes_[cur].pair);
      TraceEvent ev;
      ev.step = stats_.iterations;
      ev.pair = nodes_[cur].pair;
      if (nodes_[cur].parent == kNoParent) {
        ev.kind = "partial-failure-root";
        record(std::move(ev));
        if (cur == origin) nodes_[cur].mark = NodeMark::TotalFailure;
        failure_at_ = nodes_[cur].pair;
        if (s_.size() == s_before) ++stats_.chains_without_new_s;
        return Outcome::TotalFailure;
      }
      const std::size_t parent = nodes_[cur].parent;
      Node& p = nodes_[parent];
      if (p.mark == NodeMark::Bpa1Guess && nodes_[cur].edge == EdgeKind::Transition) {
        auto [plhs, prhs] = normalized(p);
        const Nonterminal x = plhs.front();
        const Nonterminal y = prhs.front();
        if (!t_.is_normed(plhs) && !t_.is_normed(prhs)) {
          // Unnormed guess: strengthen it to the whole pair.
          if (opts_.trace) snapshot("partial-failure");
          ev.kind = "partial-failure-replace";
          ev.pair = p.pair;
          basis_remove(parent, ev);
          add_to_s(x, y, ev);
          delete_below(parent, ev);
          basis_add(parent, plhs, prhs, ev);
          nodes_[parent].mark = NodeMark::Bpa2Guess;
          nodes_[parent].step = stats_.iterations;
          record(std::move(ev));
          const Word alpha = drop(plhs, 1);
          const Word beta = drop(prhs, 1);
          std::vector<std::tuple<Word, Word, EdgeKind, Terminal>> kids;
          for (const Matching& m : matching(x, y)) {
            kids.emplace_back(prune(t_, concat(*m.lhs, alpha)), prune(t_, concat(*m.rhs, beta)),
                              EdgeKind::Transition, m.label);
          }
          add_children(parent, std::move(kids));
          if (s_.size() == s_before) ++stats_.chains_without_new_s;
          return Outcome::Continue;
        }
        ev.kind = "partial-failure-remove";
        ev.pair = p.pair;
        basis_remove(parent, ev);
        add_to_s(x, y, ev);
        record(std::move(ev));
      }
      // Otherwise the failure moves up to the parent.
      cur = parent;
    }
  }

  void delete_below(std::size_t id, TraceEvent& ev) {
    std::vector<std::size_t> work(nodes_[id].children.begin(), nodes_[id].children.end());
    nodes_[id].children.clear();
    while (!work.empty()) {
      std::size_t k = work.back();
      work.pop_back();
      uncount_visited(k);
      basis_remove(k, ev);
      nodes_[k].alive = false;
      work.insert(work.end(), nodes_[k].children.begin(), nodes_[k].children.end());
    }
  }

  void record(TraceEvent ev) {
    if (opts_.trace) events_.push_back(std::move(ev));
  }

  void snapshot(const char* reason) {
    TreeSnapshot snap;
    snap.reason = reason;
    snap.step = stats_.iterations;
    std::vector<std::size_t> work{0};
    std::unordered_map<std::size_t, std::size_t> renumber;
    // Preorder numbering so node 0 is the root and children follow parents.
    std::vector<std::size_t> order;
    while (!work.empty()) {
      std::size_t k = work.back();
      work.pop_back();
      renumber[k] = order.size();
      order.push_back(k);
      const auto& ch = nodes_[k].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) work.push_back(*it);
    }
    for (std::size_t k : order) {
      const Node& node = nodes_[k];
      TreeSnapshot::Node s{node.pair, node.mark, node.edge, node.label, node.step, {}};
      for (std::size_t c : node.children) s.children.push_back(renumber.at(c));
      snap.nodes.push_back(std::move(s));
    }
    phases_.push_back(std::move(snap));
  }

  void check_budget() {
    if (!opts_.enforce_budget) return;
    if (static_cast<long double>(stats_.iterations) > stats_.iteration_budget) {
      throw BudgetExceeded("iteration budget exceeded after " + std::to_string(stats_.iterations) + " iterations");
    }
    if (static_cast<long double>(stats_.basis_changes) > stats_.change_budget) {
      throw BudgetExceeded("basis-change budget exceeded after " + std::to_string(stats_.basis_changes) +
                           " changes");
    }
  }

  const Grammar& g_;
  const NormTable& t_;
  DecideOptions opts_;
  Basis basis_;
  std::set<NonterminalPair> s_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> stack_;
  std::unordered_map<WordPair, std::size_t, WordPairHash> visited_;
  DecisionStats stats_;
  std::vector<TreeSnapshot> phases_;
  std::vector<TraceEvent> events_;
  WordPair failure_at_;
  std::vector<WordPair> failure_chain_;
};

}  // namespace

Decision decide(const Grammar& g, const NormTable& t, const Word& gamma, const Word& delta,
                const DecideOptions& opts) {
  if (!g.is_simple()) throw ContractViolation("decide requires a simple grammar");
  if (g.has_dead_nonterminals()) throw ContractViolation("decide requires a grammar without dead nonterminals");
  if (!g.is_valid(gamma) || !g.is_valid(delta)) throw ContractViolation("word mentions an unknown nonterminal");
  return Run(g, t, opts).go(gamma, delta);
}

BisimulationCheck check_bisimilar(const Grammar& g, const Word& gamma, const Word& delta,
                                  const DecideOptions& opts) {
  DeadElimination prepared = eliminate_dead(g, {{gamma, delta}});
  BisimulationCheck out{std::move(prepared.grammar), {}, std::move(prepared.pairs[0].first),
                        std::move(prepared.pairs[0].second), {}};
  out.norms = compute_norms(out.grammar);
  out.gamma = prune(out.norms, out.gamma);
  out.delta = prune(out.norms, out.delta);
  out.decision = decide(out.grammar, out.norms, out.gamma, out.delta, opts);
  return out;
}

}  // namespace simplebisim
