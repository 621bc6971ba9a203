#pragma once

// Seeded random testing of the decision procedure against the oracles.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "simplebisim/grammar.hpp"

namespace simplebisim {

struct FuzzConfig {
  std::uint64_t seed = 1;
  std::size_t count = 1000;
  std::size_t max_nonterminals = 6;
  std::size_t max_terminals = 3;
  std::size_t max_rhs = 2;
  std::size_t max_word = 3;
  /// Leave some nonterminals without productions in every instance.
  bool inject_dead = false;
  std::uint64_t max_depth = 64;
  std::size_t len_cap = 64;
};

struct FuzzInstance {
  Grammar grammar;
  Word gamma;
  Word delta;
};

/// Per-instance seed: splitmix64 of seed ^ (index * golden ratio).
std::uint64_t instance_seed(std::uint64_t seed, std::size_t index);
FuzzInstance random_instance(std::mt19937_64& rng, const FuzzConfig& cfg);

/// Grammar text followed by `# gamma:` / `# delta:` comment lines; replays
/// through parse_grammar with identical nonterminal indices.
std::string format_instance(const FuzzInstance& inst);

struct FuzzDiscrepancy {
  std::size_t index = 0;
  std::string kind;
  std::string detail;
  std::string reproducer;
};

struct FuzzReport {
  std::size_t instances = 0;
  std::size_t bisimilar = 0;
  std::size_t not_bisimilar = 0;
  std::size_t yes_certified = 0;
  std::size_t no_certified = 0;
  std::size_t closure_inconclusive = 0;
  std::size_t approximant_inconclusive = 0;
  std::size_t dead_instances = 0;
  std::size_t complexity_violations = 0;
  std::size_t chains_without_new_s = 0;
  std::uint64_t max_iterations = 0;
  std::uint64_t max_basis_changes = 0;
  std::uint64_t max_distinguishing_depth = 0;
  std::vector<FuzzDiscrepancy> discrepancies;

  /// Stable text summary (byte-identical for identical configs).
  std::string summary() const;
};

FuzzReport run_fuzz(const FuzzConfig& cfg);

}  // namespace simplebisim
