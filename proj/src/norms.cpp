#include "simplebisim/norms.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

#include "simplebisim/error.hpp"

namespace simplebisim {

std::uint64_t ExtendedNat::value() const {
  if (!finite_) throw DomainError("value() of an infinite extended natural");
  return value_;
}

ExtendedNat operator+(ExtendedNat lhs, ExtendedNat rhs) {
  if (!lhs.finite_ || !rhs.finite_) return ExtendedNat::infinite();
  if (lhs.value_ > std::numeric_limits<std::uint64_t>::max() - rhs.value_) {
    throw DomainError("norm overflow");
  }
  return ExtendedNat(lhs.value_ + rhs.value_);
}

std::string ExtendedNat::to_string() const { return finite_ ? std::to_string(value_) : "inf"; }

NormTable::NormTable(std::vector<ExtendedNat> norms, std::vector<std::optional<CanonicalStep>> steps)
    : norms_(std::move(norms)), steps_(std::move(steps)) {}

ExtendedNat NormTable::norm(const Word& w) const {
  ExtendedNat total(0);
  for (Nonterminal x : w) {
    total = total + norm(x);
    if (total.is_infinite()) break;
  }
  return total;
}

bool NormTable::is_normed(const Word& w) const {
  return std::all_of(w.begin(), w.end(), [this](Nonterminal x) { return is_normed(x); });
}

const CanonicalStep* NormTable::canonical_step(Nonterminal x) const {
  const auto& step = steps_.at(index_of(x));
  return step ? &*step : nullptr;
}

bool NormTable::symbol_less(Nonterminal x, Nonterminal y) const {
  ExtendedNat nx = norm(x);
  ExtendedNat ny = norm(y);
  if (nx != ny) return nx < ny;
  return index_of(x) < index_of(y);
}

bool NormTable::word_less(const Word& lhs, const Word& rhs) const {
  return std::lexicographical_compare(
      lhs.begin(), lhs.end(), rhs.begin(), rhs.end(),
      [this](Nonterminal a, Nonterminal b) { return symbol_less(a, b); });
}

NormTable compute_norms(const Grammar& g) {
  const std::size_t n = g.nonterminal_count();

  struct ProductionRef {
    Nonterminal lhs;
    const Production* prod;
    std::size_t pending;    // right-hand-side occurrences not yet settled
    std::uint64_t partial;  // sum of settled occurrences
  };
  std::vector<ProductionRef> refs;
  std::vector<std::vector<std::size_t>> occurrences(n);  // symbol -> refs (with multiplicity)
  for (std::uint32_t i = 0; i < n; ++i) {
    auto x = static_cast<Nonterminal>(i);
    for (const Production& p : g.productions(x)) {
      std::size_t id = refs.size();
      refs.push_back({x, &p, p.rhs.size(), 0});
      for (Nonterminal y : p.rhs) occurrences[index_of(y)].push_back(id);
    }
  }

  std::vector<ExtendedNat> norms(n, ExtendedNat::infinite());
  std::vector<bool> settled(n, false);
  using Entry = std::pair<std::uint64_t, std::uint32_t>;  // (candidate norm, index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  auto offer = [&](const ProductionRef& r) {
    std::uint64_t candidate = r.partial + 1;
    std::uint32_t i = index_of(r.lhs);
    if (!settled[i] && (norms[i].is_infinite() || candidate < norms[i].value())) {
      norms[i] = ExtendedNat(candidate);
      queue.emplace(candidate, i);
    }
  };
  for (const ProductionRef& r : refs) {
    if (r.pending == 0) offer(r);
  }
  while (!queue.empty()) {
    auto [value, i] = queue.top();
    queue.pop();
    if (settled[i] || norms[i] != ExtendedNat(value)) continue;
    settled[i] = true;
    for (std::size_t id : occurrences[i]) {
      ProductionRef& r = refs[id];
      r.partial = (ExtendedNat(r.partial) + ExtendedNat(value)).value();
      if (--r.pending == 0) offer(r);
    }
  }

  std::vector<std::optional<CanonicalStep>> steps(n);
  NormTable partial(norms, steps);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (norms[i].is_infinite()) continue;
    auto x = static_cast<Nonterminal>(i);
    // Productions are already ordered by (terminal, rhs); the first
    // norm-reducing one is the canonical step.
    for (const Production& p : g.productions(x)) {
      ExtendedNat rhs_norm = partial.norm(p.rhs);
      if (rhs_norm.is_finite() && rhs_norm.value() + 1 == norms[i].value()) {
        steps[i] = CanonicalStep{p.label, p.rhs};
        break;
      }
    }
  }
  return NormTable(std::move(norms), std::move(steps));
}

std::uint64_t seminorm(const NormTable& t, const Word& w) {
  std::uint64_t total = 0;
  for (Nonterminal x : w) {
    ExtendedNat nx = t.norm(x);
    if (nx.is_infinite()) break;
    total = (ExtendedNat(total) + nx).value();
  }
  return total;
}

Word norm_dynamic(const NormTable& t, const Word& w, std::uint64_t k) {
  if (k > seminorm(t, w)) throw DomainError("norm_dynamic: k exceeds the seminorm");
  // Iterative form of: (X g)|k = g|(k-|X|) if |X| <= k, else (alpha_X|(k-1)) g.
  Word current = w;
  std::size_t head = 0;  // current word is current[head..]
  while (k > 0) {
    Nonterminal x = current[head];
    std::uint64_t nx = t.norm(x).value();
    if (nx <= k) {
      k -= nx;
      ++head;
    } else {
      const CanonicalStep* step = t.canonical_step(x);
      Word next = step->rhs;
      next.insert(next.end(), current.begin() + static_cast<std::ptrdiff_t>(head) + 1, current.end());
      current = std::move(next);
      head = 0;
      --k;
    }
  }
  return drop(current, head);
}

std::vector<Terminal> canonical_word(const NormTable& t, Nonterminal x) {
  if (!t.is_normed(x)) throw DomainError("canonical_word of an unnormed nonterminal");
  std::vector<Terminal> out;
  Word current{x};
  while (!current.empty()) {
    const CanonicalStep* step = t.canonical_step(current.front());
    out.push_back(step->label);
    Word next = step->rhs;
    next.insert(next.end(), current.begin() + 1, current.end());
    current = std::move(next);
  }
  return out;
}

std::uint64_t valuation(const NormTable& t, const Grammar& g) {
  std::uint64_t best = 0;
  for (std::uint32_t i = 0; i < g.nonterminal_count(); ++i) {
    for (const Production& p : g.productions(static_cast<Nonterminal>(i))) {
      best = std::max(best, seminorm(t, p.rhs));
    }
  }
  return best;
}

Word prune(const NormTable& t, const Word& w) {
  auto first_unnormed =
      std::find_if(w.begin(), w.end(), [&t](Nonterminal x) { return !t.is_normed(x); });
  if (first_unnormed == w.end()) return w;
  return Word(w.begin(), first_unnormed + 1);
}

}  // namespace simplebisim
