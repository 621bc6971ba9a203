#pragma once

// JSON documents for traces, certificates and verdicts (schema 1).

#include <string>

#include "json.hpp"
#include "simplebisim/basis_updating.hpp"
#include "simplebisim/congruence.hpp"
#include "simplebisim/norms.hpp"
#include "simplebisim/oracle.hpp"

namespace simplebisim {

inline constexpr int kTraceSchema = 1;

nlohmann::json word_json(const Grammar& g, const Word& w);
nlohmann::json pair_json(const Grammar& g, const WordPair& p);
nlohmann::json basis_json(const Grammar& g, const Basis& b);

/// Nested tree: {"pair", "mark", "step", "edge", "children"}.
nlohmann::json tree_json(const Grammar& g, const TreeSnapshot& snap);

/// Verdict, stats, certificate and, when traced, phases and events.
nlohmann::json decision_json(const Grammar& g, const BisimulationCheck& check);

nlohmann::json congruence_json(const Grammar& g, const CongruenceVerdict& v);
nlohmann::json oracle_json(const Grammar& g, const OracleVerdict& v);
nlohmann::json norms_json(const Grammar& g, const NormTable& t);

/// Indented text form of a tree produced by tree_json, one node per line:
/// `<edge>: [<step> <mark>] <lhs> , <rhs>` where step is `-` when unvisited.
std::string render_tree(const nlohmann::json& tree);

}  // namespace simplebisim
