#include "simplebisim/fuzz.hpp"

#include <algorithm>
#include <sstream>

#include "simplebisim/basis_updating.hpp"
#include "simplebisim/congruence.hpp"
#include "simplebisim/error.hpp"
#include "simplebisim/norms.hpp"
#include "simplebisim/oracle.hpp"

namespace simplebisim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
bool coin(std::mt19937_64& rng, std::size_t num, std::size_t den) { return pick(rng, den) < num; }

}  // namespace

std::uint64_t instance_seed(std::uint64_t seed, std::size_t index) {
  return splitmix64(seed ^ (static_cast<std::uint64_t>(index) * 0x9e3779b97f4a7c15ULL));
}

FuzzInstance random_instance(std::mt19937_64& rng, const FuzzConfig& cfg) {
  FuzzInstance inst;
  Grammar& g = inst.grammar;
  const std::size_t n = 1 + pick(rng, cfg.max_nonterminals);
  const std::size_t k = 1 + pick(rng, cfg.max_terminals);
  // Twins: the upper half copies the lower half with each right-hand-side
  // symbol sent to itself or its twin, so X and its twin are bisimilar.
  const bool twins = n >= 2 && coin(rng, 1, 2);
  const std::size_t base = twins ? n / 2 : n;

  std::vector<Nonterminal> nts;
  for (std::size_t i = 0; i < n; ++i) nts.push_back(g.intern_nonterminal("N" + std::to_string(i)));
  std::vector<Terminal> ts;
  for (std::size_t i = 0; i < k; ++i) ts.push_back(g.intern_terminal(std::string(1, static_cast<char>('a' + i))));

  std::vector<bool> dead(base, false);
  if (cfg.inject_dead) {
    dead[pick(rng, base)] = true;
    for (std::size_t i = 0; i < base; ++i) {
      if (coin(rng, 1, 6)) dead[i] = true;
    }
  }
  for (std::size_t i = 0; i < base; ++i) {
    if (dead[i]) continue;
    bool any = false;
    for (std::size_t a = 0; a < k; ++a) {
      if (!coin(rng, 1, 2) && !(a + 1 == k && !any)) continue;
      Word rhs;
      std::size_t len = pick(rng, cfg.max_rhs + 1);
      for (std::size_t j = 0; j < len; ++j) rhs.push_back(nts[pick(rng, base)]);
      g.add_production(nts[i], ts[a], std::move(rhs));
      any = true;
    }
  }
  auto twin_of = [&](Nonterminal x) {
    std::size_t i = index_of(x);
    return i < base && base + i < n ? nts[base + i] : x;
  };
  auto mix = [&](const Word& w) {
    Word out;
    for (Nonterminal x : w) out.push_back(coin(rng, 1, 2) ? twin_of(x) : x);
    return out;
  };
  if (twins) {
    for (std::size_t i = base; i < n; ++i) {
      std::size_t src = i - base;
      if (src >= base) continue;
      for (const Production& p : std::vector<Production>(g.productions(nts[src]).begin(), g.productions(nts[src]).end())) {
        g.add_production(nts[i], p.label, mix(p.rhs));
      }
    }
  }

  auto random_word = [&] {
    Word w;
    std::size_t len = 1 + pick(rng, cfg.max_word);
    for (std::size_t j = 0; j < len; ++j) w.push_back(nts[pick(rng, n)]);
    return w;
  };
  inst.gamma = random_word();
  switch (pick(rng, 5)) {
    case 0: inst.delta = random_word(); break;
    case 1: inst.delta = twins ? mix(inst.gamma) : random_word(); break;
    case 2: {
      // Same prefix, different tail: bisimilar whenever the prefix is unnormed.
      inst.delta = inst.gamma;
      inst.delta.push_back(nts[pick(rng, n)]);
      break;
    }
    case 3: {
      // Short heads over a shared unnormed tail; partial failures below the
      // heads then go through the S set.
      NormTable t = compute_norms(g);
      std::vector<Nonterminal> normed, unnormed;
      for (Nonterminal x : nts) {
        if (t.is_normed(Word{x})) {
          normed.push_back(x);
        } else if (!g.productions(x).empty()) {
          unnormed.push_back(x);
        }
      }
      auto any_of = [&](const std::vector<Nonterminal>& from) { return from.empty() ? nts[pick(rng, n)] : from[pick(rng, from.size())]; };
      const Nonterminal tail = any_of(unnormed);
      auto labels = [&](Nonterminal x) {
        std::vector<Terminal> out;
        for (const Production& p : g.productions(x)) out.push_back(p.label);
        std::sort(out.begin(), out.end());
        return out;
      };
      std::vector<std::pair<Nonterminal, Nonterminal>> alike;
      for (Nonterminal x : normed) {
        for (Nonterminal y : normed) {
          if (x != y && t.norm(x) == t.norm(y) && labels(x) == labels(y)) alike.emplace_back(x, y);
        }
      }
      if (!alike.empty() && coin(rng, 3, 4)) {
        auto [x, y] = alike[pick(rng, alike.size())];
        inst.gamma = Word{x};
        inst.delta = Word{y};
      } else {
        inst.gamma = Word{any_of(normed)};
        inst.delta = coin(rng, 1, 2) ? mix(inst.gamma) : Word{any_of(normed)};
      }
      inst.gamma.push_back(tail);
      inst.delta.push_back(tail);
      break;
    }
    default: {
      inst.delta = mix(inst.gamma);
      if (!inst.delta.empty() && coin(rng, 1, 2)) inst.delta.pop_back();
      if (inst.delta.empty()) inst.delta = random_word();
      break;
    }
  }
  return inst;
}

std::string format_instance(const FuzzInstance& inst) {
  std::string out = format_grammar(inst.grammar);
  out += "# gamma: " + format_word(inst.grammar, inst.gamma) + "\n";
  out += "# delta: " + format_word(inst.grammar, inst.delta) + "\n";
  return out;
}

std::string FuzzReport::summary() const {
  std::ostringstream out;
  out << "instances " << instances << '\n'
      << "bisimilar " << bisimilar << '\n'
      << "not-bisimilar " << not_bisimilar << '\n'
      << "yes-certified " << yes_certified << '\n'
      << "no-certified " << no_certified << '\n'
      << "dead-symbol-instances " << dead_instances << '\n'
      << "closure-inconclusive " << closure_inconclusive << '\n'
      << "approximant-inconclusive " << approximant_inconclusive << '\n'
      << "complexity-violations " << complexity_violations << '\n'
      << "chains-without-new-s " << chains_without_new_s << '\n'
      << "max-iterations " << max_iterations << '\n'
      << "max-basis-changes " << max_basis_changes << '\n'
      << "max-distinguishing-depth " << max_distinguishing_depth << '\n'
      << "discrepancies " << discrepancies.size() << '\n';
  for (const FuzzDiscrepancy& d : discrepancies) out << "  #" << d.index << ' ' << d.kind << ": " << d.detail << '\n';
  return out.str();
}

FuzzReport run_fuzz(const FuzzConfig& cfg) {
  FuzzReport report;
  for (std::size_t i = 0; i < cfg.count; ++i) {
    std::mt19937_64 rng(instance_seed(cfg.seed, i));
    FuzzInstance inst = random_instance(rng, cfg);
    const Grammar& g = inst.grammar;
    ++report.instances;
    if (g.has_dead_nonterminals()) ++report.dead_instances;

    auto flag = [&](std::string kind, std::string detail) {
      report.discrepancies.push_back({i, std::move(kind), std::move(detail), format_instance(inst)});
    };

    BisimulationCheck check;
    try {
      check = check_bisimilar(g, inst.gamma, inst.delta);
    } catch (const Error& e) {
      flag("decide-error", e.what());
      continue;
    }
    const Decision& d = check.decision;
    report.max_iterations = std::max(report.max_iterations, d.stats.iterations);
    report.max_basis_changes = std::max(report.max_basis_changes, d.stats.basis_changes);
    report.chains_without_new_s += d.stats.chains_without_new_s;
    if (!check_basis_predicates(d.basis, check.norms).all()) flag("basis-predicates", "final basis violates an invariant");

    const bool yes = d.answer == Answer::Bisimilar;
    if (yes) {
      ++report.bisimilar;
      auto sb = check_self_bisimulation(d.basis, check.grammar, check.norms);
      auto cv = decide_coinductive(d.basis, check.grammar, check.norms, check.gamma, check.delta);
      if (sb.ok && cv.congruent) {
        ++report.yes_certified;
      } else {
        flag("yes-certificate", sb.ok ? "input pair not coinductively congruent" : "basis is not a self-bisimulation");
      }
      std::uint64_t m = std::max(seminorm(check.norms, check.gamma), seminorm(check.norms, check.delta));
      for (const BasisPair& p : d.basis.pairs()) {
        m = std::max({m, seminorm(check.norms, p.lhs), seminorm(check.norms, p.rhs)});
      }
      const long double bound = static_cast<long double>(d.basis.size()) * static_cast<long double>(m + 1);
      if (static_cast<long double>(cv.expanded_pairs) > bound * bound) {
        ++report.complexity_violations;
        flag("coinductive-complexity", std::to_string(cv.expanded_pairs) + " pairs");
      }
      auto iv = decide_inductive(d.basis, check.grammar, check.norms, check.gamma, check.delta);
      if (iv.congruent && !cv.congruent) flag("inductive-inclusion", "inductive holds but coinductive does not");
    } else {
      ++report.not_bisimilar;
    }

    ApproximantOptions aopts;
    aopts.max_depth = cfg.max_depth;
    OracleVerdict approx = approximant_distinguish(g, inst.gamma, inst.delta, aopts);
    ClosureOptions copts;
    copts.len_cap = cfg.len_cap;
    OracleVerdict closure = trace_closure_check(g, inst.gamma, inst.delta, copts);
    if (approx.outcome == OracleOutcome::Inconclusive) ++report.approximant_inconclusive;
    if (closure.outcome == OracleOutcome::Inconclusive) ++report.closure_inconclusive;

    if (!yes) {
      if (approx.outcome == OracleOutcome::No) {
        ++report.no_certified;
        report.max_distinguishing_depth = std::max(report.max_distinguishing_depth, approx.depth);
      } else {
        flag("no-certificate", std::string("approximant answered ") + to_string(approx.outcome));
      }
    } else if (approx.outcome == OracleOutcome::No) {
      flag("approximant-vs-decide", "approximant distinguishes a bisimilar pair at depth " + std::to_string(approx.depth));
    }
    if (closure.outcome != OracleOutcome::Inconclusive) {
      if ((closure.outcome == OracleOutcome::Yes) != yes) {
        flag("closure-vs-decide", std::string("closure answered ") + to_string(closure.outcome));
      }
      if (approx.outcome != OracleOutcome::Inconclusive && (closure.outcome == OracleOutcome::No) != (approx.outcome == OracleOutcome::No)) {
        flag("closure-vs-approximant", std::string("closure ") + to_string(closure.outcome) + ", approximant " + to_string(approx.outcome));
      }
      if (closure.outcome == OracleOutcome::No && approx.outcome == OracleOutcome::No && closure.depth != approx.depth) {
        flag("closure-vs-approximant", "distinguishing depths differ");
      }
    }
  }
  return report;
}

}  // namespace simplebisim
