#include "simplebisim/oracle.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_map>

#include "simplebisim/error.hpp"
#include "simplebisim/norms.hpp"

namespace simplebisim {

const char* to_string(OracleOutcome o) {
  switch (o) {
    case OracleOutcome::Yes: return "yes";
    case OracleOutcome::No: return "no";
    case OracleOutcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

struct CapReached {};

class Approximants {
 public:
  Approximants(const Grammar& g, const ApproximantOptions& opts)
      : g_(g), t_(compute_norms(g)), opts_(opts) {}

  // gamma ~n delta
  bool holds(const Word& gamma, const Word& delta, std::uint64_t n) {
    if (n == 0) return true;
    WordPair key{prune(t_, gamma), prune(t_, delta)};
    auto it = memo_.find(key);
    if (it == memo_.end()) {
      if (memo_.size() >= opts_.max_pairs) throw CapReached{};
      it = memo_.emplace(key, Entry{}).first;
    }
    if (it->second.ok_level >= n) return true;
    if (it->second.fail_level <= n) return false;

    auto lhs = transitions(g_, key.first);
    auto rhs = transitions(g_, key.second);
    bool ok = matched(lhs, rhs, n) && matched(rhs, lhs, n);
    Entry& e = memo_[key];  // the table may have grown
    if (ok) {
      e.ok_level = std::max(e.ok_level, n);
    } else {
      e.fail_level = std::min(e.fail_level, n);
    }
    return ok;
  }

  // Labels from (gamma, delta) to a pair with differing enabled labels,
  // given that they are not n-related.
  std::vector<Terminal> witness(Word gamma, Word delta, std::uint64_t n) {
    std::vector<Terminal> out;
    while (n > 0) {
      auto lhs = transitions(g_, gamma);
      auto rhs = transitions(g_, delta);
      if (labels_of(lhs) != labels_of(rhs)) break;
      bool stepped = false;
      auto try_side = [&](const std::vector<Transition>& from, const std::vector<Transition>& to,
                          bool swapped) {
        for (const Transition& s : from) {
          bool has_match = false;
          const Transition* first = nullptr;
          for (const Transition& r : to) {
            if (r.label != s.label) continue;
            if (first == nullptr) first = &r;
            if (holds(s.target, r.target, n - 1)) {
              has_match = true;
              break;
            }
          }
          if (!has_match && first != nullptr) {
            out.push_back(s.label);
            gamma = swapped ? first->target : s.target;
            delta = swapped ? s.target : first->target;
            return true;
          }
        }
        return false;
      };
      stepped = try_side(lhs, rhs, false) || try_side(rhs, lhs, true);
      if (!stepped) break;
      --n;
    }
    return out;
  }

  std::size_t explored() const { return memo_.size(); }

 private:
  struct Entry {
    std::uint64_t ok_level = 0;
    std::uint64_t fail_level = std::numeric_limits<std::uint64_t>::max();
  };

  static std::vector<Terminal> labels_of(const std::vector<Transition>& ts) {
    std::vector<Terminal> out;
    for (const Transition& t : ts) {
      if (out.empty() || out.back() != t.label) out.push_back(t.label);
    }
    return out;
  }

  bool matched(const std::vector<Transition>& from, const std::vector<Transition>& to, std::uint64_t n) {
    for (const Transition& s : from) {
      bool found = false;
      for (const Transition& r : to) {
        if (r.label == s.label && holds(s.target, r.target, n - 1)) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

  const Grammar& g_;
  NormTable t_;
  ApproximantOptions opts_;
  std::unordered_map<WordPair, Entry, WordPairHash> memo_;
};

}  // namespace

OracleVerdict approximant_distinguish(const Grammar& g, const Word& gamma, const Word& delta,
                                      const ApproximantOptions& opts) {
  OracleVerdict v;
  Approximants a(g, opts);
  try {
    for (std::uint64_t n = 1; n <= opts.max_depth; ++n) {
      if (!a.holds(gamma, delta, n)) {
        v.outcome = OracleOutcome::No;
        v.depth = n;
        v.witness = a.witness(gamma, delta, n);
        v.pairs_explored = a.explored();
        return v;
      }
    }
    v.outcome = OracleOutcome::Yes;
  } catch (const CapReached&) {
    v.outcome = OracleOutcome::Inconclusive;
  }
  v.pairs_explored = a.explored();
  return v;
}

OracleVerdict trace_closure_check(const Grammar& g, const Word& gamma, const Word& delta,
                                  const ClosureOptions& opts) {
  if (!g.is_simple()) throw ContractViolation("closure oracle requires a simple grammar");
  NormTable t = compute_norms(g);

  struct Visit {
    std::size_t parent;
    Terminal label;
    std::uint64_t depth;
  };
  std::vector<WordPair> order;
  std::vector<Visit> info;
  std::unordered_map<WordPair, std::size_t, WordPairHash> seen;
  std::deque<std::size_t> queue;

  OracleVerdict v;
  auto enqueue = [&](WordPair p, std::size_t parent, Terminal label, std::uint64_t depth) {
    if (seen.count(p) != 0) return true;
    if (p.first.size() > opts.len_cap || p.second.size() > opts.len_cap || order.size() >= opts.max_pairs) {
      return false;
    }
    seen.emplace(p, order.size());
    order.push_back(std::move(p));
    info.push_back({parent, label, depth});
    queue.push_back(order.size() - 1);
    return true;
  };

  if (!enqueue({prune(t, gamma), prune(t, delta)}, 0, Terminal{}, 0)) {
    v.pairs_explored = order.size();
    return v;
  }
  while (!queue.empty()) {
    std::size_t id = queue.front();
    queue.pop_front();
    auto lhs = transitions(g, order[id].first);
    auto rhs = transitions(g, order[id].second);
    bool same = lhs.size() == rhs.size();
    for (std::size_t i = 0; same && i < lhs.size(); ++i) same = lhs[i].label == rhs[i].label;
    if (!same) {
      v.outcome = OracleOutcome::No;
      v.depth = info[id].depth + 1;
      for (std::size_t cur = id; cur != 0; cur = info[cur].parent) v.witness.push_back(info[cur].label);
      std::reverse(v.witness.begin(), v.witness.end());
      v.pairs_explored = order.size();
      return v;
    }
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      if (!enqueue({prune(t, lhs[i].target), prune(t, rhs[i].target)}, id, lhs[i].label, info[id].depth + 1)) {
        v.outcome = OracleOutcome::Inconclusive;
        v.pairs_explored = order.size();
        return v;
      }
    }
  }
  v.outcome = OracleOutcome::Yes;
  v.pairs_explored = order.size();
  return v;
}

}  // namespace simplebisim
