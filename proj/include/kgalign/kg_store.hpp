#ifndef KGALIGN_KG_STORE_HPP
#define KGALIGN_KG_STORE_HPP

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgalign/vocab.hpp"

namespace kgalign {

using EntityId = int;
using RelationId = int;

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  bool operator==(const Triple& o) const {
    return head == o.head && relation == o.relation && tail == o.tail;
  }
};

struct EntityRecord {
  EntityId id;
  std::string label;       // unique key used by data files
  std::string name;        // display name used when verbalizing
  std::vector<int> desc;   // tokenized description, never empty (UNK if blank)
};

// Immutable triple store with per-entity descriptions, adjacency lists and a
// degree index. Ids are dense and assigned by first appearance: entities in
// descriptions-file order, relations in triples-file order. Two relation ids
// beyond the file relations are reserved for the subgraph INTERACT edges and
// the GAT self term.
struct KnowledgeGraph {
  std::vector<EntityRecord> entities;
  std::vector<std::string> relation_labels;  // file relations only
  std::vector<Triple> triples;

  std::vector<std::vector<int>> out_triples;  // entity -> triple indices (as head)
  std::vector<std::vector<int>> in_triples;   // entity -> triple indices (as tail)
  std::vector<int> degree;                    // head occurrences + tail occurrences

  std::unordered_map<std::string, EntityId> entity_by_label;

  int num_entities() const { return static_cast<int>(entities.size()); }
  int num_file_relations() const { return static_cast<int>(relation_labels.size()); }
  int num_relations() const { return num_file_relations() + 2; }  // + INTERACT, SELF
  RelationId interact_relation() const { return num_file_relations(); }
  RelationId self_relation() const { return num_file_relations() + 1; }

  EntityId entity_id(const std::string& label) const;  // -1 if unknown
  const std::string& display_name(EntityId e) const;
  std::string relation_label(RelationId r) const;
};

// triples file: head_label<TAB>relation_label<TAB>tail_label per line
// descriptions file: entity_label<TAB>display_name<TAB>description per line
KnowledgeGraph load_graph(const std::string& triples_path, const std::string& descriptions_path,
                          const Vocab& vocab);

struct HopInfo {
  int dist = 0;                 // min undirected hop distance over all seeds
  std::set<EntityId> seeds;     // seeds within k hops
};

// Every entity at undirected shortest-path distance <= k of some seed, keyed
// by entity; seeds themselves are excluded.
std::map<EntityId, HopInfo> khop_reach(const KnowledgeGraph& g, const std::set<EntityId>& seeds,
                                       int k);

// Exactly the triples with both endpoints in the node set, original order.
std::vector<Triple> connecting_triples(const KnowledgeGraph& g, const std::set<EntityId>& nodes);

}  // namespace kgalign

#endif
