#include "simplebisim/report.hpp"

#include <functional>
#include <sstream>

namespace simplebisim {

using nlohmann::json;

json word_json(const Grammar& g, const Word& w) { return format_word(g, w); }

json pair_json(const Grammar& g, const WordPair& p) {
  return json::array({word_json(g, p.first), word_json(g, p.second)});
}

static json basis_pair_json(const Grammar& g, const BasisPair& p) {
  return json::array({word_json(g, p.lhs), word_json(g, p.rhs)});
}

json basis_json(const Grammar& g, const Basis& b) {
  json out = json::array();
  for (const BasisPair& p : b.pairs()) out.push_back(basis_pair_json(g, p));
  return out;
}

json tree_json(const Grammar& g, const TreeSnapshot& snap) {
  std::function<json(std::size_t)> build = [&](std::size_t id) {
    const TreeSnapshot::Node& n = snap.nodes[id];
    json node;
    node["pair"] = pair_json(g, n.pair);
    node["mark"] = to_string(n.mark);
    node["step"] = n.step == 0 ? json(nullptr) : json(n.step);
    switch (n.edge) {
      case EdgeKind::Root: node["edge"] = nullptr; break;
      case EdgeKind::Transition: node["edge"] = g.name(n.label); break;
      default: node["edge"] = to_string(n.edge); break;
    }
    json kids = json::array();
    for (std::size_t c : n.children) kids.push_back(build(c));
    node["children"] = std::move(kids);
    return node;
  };
  return build(0);
}

json decision_json(const Grammar& g, const BisimulationCheck& check) {
  const Decision& d = check.decision;
  json out;
  out["schema"] = kTraceSchema;
  out["verdict"] = to_string(d.answer);
  out["input"] = pair_json(g, {check.gamma, check.delta});
  out["stats"] = {
      {"iterations", d.stats.iterations},
      {"basis_changes", d.stats.basis_changes},
      {"partial_failures", d.stats.partial_failures},
      {"peak_seminorm", d.stats.peak_seminorm},
      {"iteration_budget", static_cast<double>(d.stats.iteration_budget)},
      {"change_budget", static_cast<double>(d.stats.change_budget)},
  };
  json cert;
  cert["basis"] = basis_json(g, d.basis);
  json s = json::array();
  for (auto [x, y] : d.s_set) s.push_back(json::array({g.name(x), g.name(y)}));
  cert["s"] = std::move(s);
  if (d.answer == Answer::Bisimilar) {
    json pairs = json::array();
    for (const WordPair& p : d.tree_pairs) pairs.push_back(pair_json(g, p));
    cert["tree_pairs"] = std::move(pairs);
  } else {
    cert["total_failure"] = pair_json(g, *d.total_failure);
    json chain = json::array();
    for (const WordPair& p : d.failure_chain) chain.push_back(pair_json(g, p));
    cert["failure_chain"] = std::move(chain);
  }
  out["certificate"] = std::move(cert);

  if (!d.phases.empty()) {
    json phases = json::array();
    for (const TreeSnapshot& snap : d.phases) {
      phases.push_back({{"reason", snap.reason}, {"step", snap.step}, {"tree", tree_json(g, snap)}});
    }
    out["phases"] = std::move(phases);
    json events = json::array();
    for (const TraceEvent& ev : d.events) {
      json e;
      e["step"] = ev.step;
      e["kind"] = ev.kind;
      e["pair"] = pair_json(g, ev.pair);
      json added = json::array();
      for (const BasisPair& p : ev.basis_added) added.push_back(basis_pair_json(g, p));
      json removed = json::array();
      for (const BasisPair& p : ev.basis_removed) removed.push_back(basis_pair_json(g, p));
      json s_added = json::array();
      for (auto [x, y] : ev.s_added) s_added.push_back(json::array({g.name(x), g.name(y)}));
      e["basis_added"] = std::move(added);
      e["basis_removed"] = std::move(removed);
      e["s_added"] = std::move(s_added);
      events.push_back(std::move(e));
    }
    out["events"] = std::move(events);
  }
  return out;
}

json congruence_json(const Grammar& g, const CongruenceVerdict& v) {
  std::function<json(std::size_t)> build = [&](std::size_t id) {
    const ProofNode& n = v.nodes[id];
    json kids = json::array();
    for (std::size_t c : n.children) kids.push_back(build(c));
    return json{{"pair", pair_json(g, n.pair)}, {"rule", to_string(n.rule)}, {"children", std::move(kids)}};
  };
  json out;
  out["schema"] = kTraceSchema;
  out["verdict"] = v.congruent ? "congruent" : "not-congruent";
  out["distinct_pairs"] = v.distinct_pairs;
  out["expanded_pairs"] = v.expanded_pairs;
  out["proof"] = v.nodes.empty() ? json(nullptr) : build(0);
  if (const WordPair* stuck = v.stuck_pair()) {
    json path = json::array();
    for (std::size_t id : v.refutation_path) path.push_back(pair_json(g, v.nodes[id].pair));
    out["refutation"] = {{"pair", pair_json(g, *stuck)},
                         {"rule", to_string(v.nodes[v.refutation_path.back()].rule)},
                         {"path", std::move(path)}};
  }
  return out;
}

json oracle_json(const Grammar& g, const OracleVerdict& v) {
  json out;
  out["schema"] = kTraceSchema;
  out["verdict"] = to_string(v.outcome);
  out["pairs_explored"] = v.pairs_explored;
  if (v.outcome == OracleOutcome::No) {
    out["depth"] = v.depth;
    json labels = json::array();
    for (Terminal a : v.witness) labels.push_back(g.name(a));
    out["witness"] = std::move(labels);
  }
  return out;
}

json norms_json(const Grammar& g, const NormTable& t) {
  json rows = json::array();
  for (std::uint32_t i = 0; i < g.nonterminal_count(); ++i) {
    auto x = static_cast<Nonterminal>(i);
    ExtendedNat n = t.norm(x);
    json row{{"nonterminal", g.name(x)}, {"norm", n.is_finite() ? json(n.value()) : json("inf")}};
    if (const CanonicalStep* s = t.canonical_step(x)) {
      row["step"] = {{"label", g.name(s->label)}, {"rhs", word_json(g, s->rhs)}};
    } else {
      row["step"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  return {{"schema", kTraceSchema}, {"norms", std::move(rows)}, {"valuation", valuation(t, g)}};
}

std::string render_tree(const json& tree) {
  std::ostringstream out;
  std::function<void(const json&, int)> walk = [&](const json& node, int depth) {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ');
    if (!node["edge"].is_null()) out << node["edge"].get<std::string>() << ": ";
    out << '[' << (node["step"].is_null() ? std::string("-") : std::to_string(node["step"].get<std::uint64_t>()))
        << ' ' << node["mark"].get<std::string>() << "] " << node["pair"][0].get<std::string>() << " , "
        << node["pair"][1].get<std::string>() << '\n';
    for (const json& c : node["children"]) walk(c, depth + 1);
  };
  walk(tree, 0);
  return out.str();
}

}  // namespace simplebisim
