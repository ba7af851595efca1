#ifndef KGALIGN_SUBGRAPH_HPP
#define KGALIGN_SUBGRAPH_HPP

#include <string>
#include <vector>

#include "kgalign/kg_store.hpp"
#include "kgalign/nli.hpp"

namespace kgalign {

struct SelectionConfig {
  int hop_k = 1;              // neighborhood radius
  int top_k = 8;              // max neighbors kept after degree selection
  int min_shared_seeds = 2;   // candidates must reach this many extracted entities
  double nli_threshold = 0.5;

  void validate() const;
};

enum class NodeKind { Extracted, Neighbor, Interaction };

const char* node_kind_name(NodeKind k);

// Per-sample typed graph. Exactly one interaction node (always last), INTERACT
// edges in both directions between it and every extracted node, and every
// other edge is a triple of the backing graph.
struct Subgraph {
  struct Node {
    EntityId entity;  // -1 for the interaction node
    NodeKind kind;
  };
  struct Edge {
    int src;
    RelationId rel;
    int dst;
  };

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  int interaction_index = -1;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  // incoming edge indices per node, in edge order
  std::vector<std::vector<int>> in_edges() const;
};

// Entities within hop_k of at least min_shared_seeds extracted entities,
// paired with global degree, ascending id. Extracted entities are excluded.
std::vector<std::pair<EntityId, int>> candidate_neighbors(const KnowledgeGraph& g,
                                                          const std::set<EntityId>& extracted,
                                                          const SelectionConfig& cfg);

// Keeps the top_k lowest-degree candidates, ties by ascending id; the result
// is sorted by (degree, id).
std::vector<EntityId> select_by_degree(const std::vector<std::pair<EntityId, int>>& candidates,
                                       int top_k);

// "{head name} {relation label} {tail name}." with underscores as spaces
std::string verbalize_triple(const KnowledgeGraph& g, const Triple& t);

struct NeighborNliScore {
  EntityId entity;
  NliVerdict best;          // verdict of the best-scoring linking triple
  std::string best_triple;  // its verbalization ("" when no linking triple)
  bool kept = false;
};

// Keeps a neighbor iff some triple linking it to an extracted entity scores
// max(entail, contradict) above the threshold. Order preserved.
std::vector<EntityId> nli_filter(const KnowledgeGraph& g, const std::string& sample_text,
                                 const std::set<EntityId>& extracted,
                                 const std::vector<EntityId>& selected, const NliScorer& scorer,
                                 const SelectionConfig& cfg,
                                 std::vector<NeighborNliScore>* scores_out = nullptr);

Subgraph build_subgraph(const KnowledgeGraph& g, const std::set<EntityId>& extracted,
                        const std::vector<EntityId>& kept_neighbors);

// canonical JSON rendering (used by inspect and the determinism checks)
std::string subgraph_to_json(const KnowledgeGraph& g, const Subgraph& sg,
                             const std::vector<NeighborNliScore>& neighbor_scores);

}  // namespace kgalign

#endif
