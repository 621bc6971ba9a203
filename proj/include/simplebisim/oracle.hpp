#pragma once

// Ground-truth oracles used to validate the decision procedure: bisimilarity
// approximants (refutation) and a synchronized closure search (confirmation).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "simplebisim/grammar.hpp"

namespace simplebisim {

enum class OracleOutcome : std::uint8_t { Yes, No, Inconclusive };

const char* to_string(OracleOutcome o);

struct OracleVerdict {
  OracleOutcome outcome = OracleOutcome::Inconclusive;
  /// For No: the least n with the words not n-related.
  std::uint64_t depth = 0;
  /// For No: labels leading to a pair whose enabled labels differ.
  std::vector<Terminal> witness;
  /// Distinct pairs the oracle examined.
  std::size_t pairs_explored = 0;
};

struct ApproximantOptions {
  std::uint64_t max_depth = 64;
  /// Memo entries allowed before giving up with Inconclusive.
  std::size_t max_pairs = 200000;
};

/// Evaluates the approximants n = 1..max_depth by their recursive
/// definition, memoized on pruned pairs. Works for arbitrary grammars.
/// Yes means related at every depth up to max_depth, not bisimilar.
OracleVerdict approximant_distinguish(const Grammar& g, const Word& gamma, const Word& delta,
                                      const ApproximantOptions& opts = {});

struct ClosureOptions {
  std::size_t len_cap = 64;
  std::size_t max_pairs = 200000;
};

/// Breadth-first search of the synchronized pair graph from the pruned
/// pair. Yes when it closes within the caps. Requires a simple grammar.
OracleVerdict trace_closure_check(const Grammar& g, const Word& gamma, const Word& delta,
                                  const ClosureOptions& opts = {});

}  // namespace simplebisim
