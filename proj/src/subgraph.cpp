#include "kgalign/subgraph.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace kgalign {

void SelectionConfig::validate() const {
  if (hop_k < 1) throw std::invalid_argument("selection: hop_k must be >= 1");
  if (top_k < 0) throw std::invalid_argument("selection: top_k must be >= 0");
  if (min_shared_seeds < 1) throw std::invalid_argument("selection: min_shared_seeds must be >= 1");
  if (nli_threshold < 0.0 || nli_threshold > 1.0)
    throw std::invalid_argument("selection: nli_threshold must be in [0, 1]");
}

const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Extracted: return "extracted";
    case NodeKind::Neighbor: return "neighbor";
    case NodeKind::Interaction: return "interaction";
  }
  return "?";
}

std::vector<std::vector<int>> Subgraph::in_edges() const {
  std::vector<std::vector<int>> in(nodes.size());
  for (size_t i = 0; i < edges.size(); ++i) in[edges[i].dst].push_back(static_cast<int>(i));
  return in;
}

std::vector<std::pair<EntityId, int>> candidate_neighbors(const KnowledgeGraph& g,
                                                          const std::set<EntityId>& extracted,
                                                          const SelectionConfig& cfg) {
  if (extracted.empty()) throw std::invalid_argument("candidate_neighbors: no extracted entities");
  cfg.validate();
  auto reach = khop_reach(g, extracted, cfg.hop_k);
  std::vector<std::pair<EntityId, int>> out;
  for (const auto& [entity, info] : reach) {
    if (static_cast<int>(info.seeds.size()) >= cfg.min_shared_seeds)
      out.emplace_back(entity, g.degree[entity]);
  }
  return out;  // map iteration is already ascending by id
}

std::vector<EntityId> select_by_degree(const std::vector<std::pair<EntityId, int>>& candidates,
                                       int top_k) {
  std::vector<std::pair<EntityId, int>> sorted = candidates;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  if (top_k < static_cast<int>(sorted.size())) sorted.resize(static_cast<size_t>(top_k));
  std::vector<EntityId> out;
  out.reserve(sorted.size());
  for (const auto& [e, d] : sorted) out.push_back(e);
  return out;
}

namespace {

std::string underscores_to_spaces(const std::string& s) {
  std::string out = s;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

}  // namespace

std::string verbalize_triple(const KnowledgeGraph& g, const Triple& t) {
  if (t.head < 0 || t.head >= g.num_entities() || t.tail < 0 || t.tail >= g.num_entities())
    throw std::invalid_argument("verbalize_triple: endpoint not in graph");
  return underscores_to_spaces(g.display_name(t.head)) + " " +
         underscores_to_spaces(g.relation_label(t.relation)) + " " +
         underscores_to_spaces(g.display_name(t.tail)) + ".";
}

std::vector<EntityId> nli_filter(const KnowledgeGraph& g, const std::string& sample_text,
                                 const std::set<EntityId>& extracted,
                                 const std::vector<EntityId>& selected, const NliScorer& scorer,
                                 const SelectionConfig& cfg,
                                 std::vector<NeighborNliScore>* scores_out) {
  std::vector<EntityId> kept;
  for (EntityId neighbor : selected) {
    NeighborNliScore rec;
    rec.entity = neighbor;
    double best = -1.0;
    // any triple with the neighbor at one end and an extracted entity at the other
    auto consider = [&](int triple_idx) {
      const Triple& t = g.triples[triple_idx];
      EntityId other = (t.head == neighbor) ? t.tail : t.head;
      if (!extracted.count(other)) return;
      std::string hyp = verbalize_triple(g, t);
      NliVerdict v;
      try {
        v = scorer.score(sample_text, hyp);
      } catch (const std::exception& e) {
        throw NliScorerError(std::string("nli scorer failed on '") + hyp + "': " + e.what());
      }
      if (v.max_signal() > best) {
        best = v.max_signal();
        rec.best = v;
        rec.best_triple = hyp;
      }
    };
    for (int ti : g.out_triples[neighbor]) consider(ti);
    for (int ti : g.in_triples[neighbor]) consider(ti);
    rec.kept = best > cfg.nli_threshold;
    if (rec.kept) kept.push_back(neighbor);
    if (scores_out) scores_out->push_back(std::move(rec));
  }
  return kept;
}

Subgraph build_subgraph(const KnowledgeGraph& g, const std::set<EntityId>& extracted,
                        const std::vector<EntityId>& kept_neighbors) {
  if (extracted.empty()) throw std::invalid_argument("build_subgraph: no extracted entities");
  for (EntityId e : kept_neighbors)
    if (extracted.count(e))
      throw std::invalid_argument("build_subgraph: neighbor " + std::to_string(e) +
                                  " is also extracted");

  Subgraph sg;
  std::map<EntityId, int> node_index;
  for (EntityId e : extracted) {
    node_index[e] = sg.num_nodes();
    sg.nodes.push_back({e, NodeKind::Extracted});
  }
  std::vector<EntityId> neighbors = kept_neighbors;
  std::sort(neighbors.begin(), neighbors.end());
  neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
  for (EntityId e : neighbors) {
    node_index[e] = sg.num_nodes();
    sg.nodes.push_back({e, NodeKind::Neighbor});
  }
  sg.interaction_index = sg.num_nodes();
  sg.nodes.push_back({-1, NodeKind::Interaction});

  std::set<EntityId> entity_nodes(extracted);
  entity_nodes.insert(neighbors.begin(), neighbors.end());
  for (const Triple& t : connecting_triples(g, entity_nodes))
    sg.edges.push_back({node_index[t.head], t.relation, node_index[t.tail]});

  const RelationId interact = g.interact_relation();
  for (EntityId e : extracted) {
    sg.edges.push_back({node_index[e], interact, sg.interaction_index});
    sg.edges.push_back({sg.interaction_index, interact, node_index[e]});
  }
  return sg;
}

std::string subgraph_to_json(const KnowledgeGraph& g, const Subgraph& sg,
                             const std::vector<NeighborNliScore>& neighbor_scores) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : sg.nodes) {
    nlohmann::json jn;
    jn["id"] = n.entity;
    jn["label"] = n.entity < 0 ? "<interaction>" : g.entities[n.entity].label;
    jn["kind"] = node_kind_name(n.kind);
    j["nodes"].push_back(jn);
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : sg.edges)
    j["edges"].push_back({{"src", e.src}, {"rel", g.relation_label(e.rel)}, {"dst", e.dst}});
  j["neighbor_nli"] = nlohmann::json::array();
  for (const auto& s : neighbor_scores)
    j["neighbor_nli"].push_back({{"id", s.entity},
                                 {"label", g.entities[s.entity].label},
                                 {"entail", s.best.entail},
                                 {"neutral", s.best.neutral},
                                 {"contradict", s.best.contradict},
                                 {"triple", s.best_triple},
                                 {"kept", s.kept}});
  return j.dump(2);
}

}  // namespace kgalign
