#include "kgalign/kg_store.hpp"

#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kgalign {

namespace {

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

EntityId KnowledgeGraph::entity_id(const std::string& label) const {
  auto it = entity_by_label.find(label);
  return it == entity_by_label.end() ? -1 : it->second;
}

const std::string& KnowledgeGraph::display_name(EntityId e) const {
  const EntityRecord& rec = entities.at(static_cast<size_t>(e));
  return rec.name.empty() ? rec.label : rec.name;
}

std::string KnowledgeGraph::relation_label(RelationId r) const {
  if (r == interact_relation()) return "<interact>";
  if (r == self_relation()) return "<self>";
  return relation_labels.at(static_cast<size_t>(r));
}

KnowledgeGraph load_graph(const std::string& triples_path, const std::string& descriptions_path,
                          const Vocab& vocab) {
  KnowledgeGraph g;

  std::ifstream desc_is(descriptions_path);
  if (!desc_is) throw std::runtime_error("load_graph: cannot open '" + descriptions_path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(desc_is, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_tsv(line);
    if (fields.size() != 3)
      throw std::runtime_error("load_graph: " + descriptions_path + ":" +
                               std::to_string(line_no) + ": expected 3 tab-separated fields");
    if (g.entity_by_label.count(fields[0]))
      throw std::runtime_error("load_graph: " + descriptions_path + ":" +
                               std::to_string(line_no) + ": duplicate entity label '" +
                               fields[0] + "'");
    EntityRecord rec;
    rec.id = static_cast<EntityId>(g.entities.size());
    rec.label = fields[0];
    rec.name = fields[1];
    rec.desc = vocab.tokenize(fields[2]);
    if (rec.desc.empty()) rec.desc.push_back(Vocab::kUnk);
    g.entity_by_label.emplace(rec.label, rec.id);
    g.entities.push_back(std::move(rec));
  }

  std::unordered_map<std::string, RelationId> rel_by_label;
  std::ifstream tri_is(triples_path);
  if (!tri_is) throw std::runtime_error("load_graph: cannot open '" + triples_path + "'");
  line_no = 0;
  while (std::getline(tri_is, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_tsv(line);
    if (fields.size() != 3)
      throw std::runtime_error("load_graph: " + triples_path + ":" + std::to_string(line_no) +
                               ": expected 3 tab-separated fields");
    auto head_it = g.entity_by_label.find(fields[0]);
    auto tail_it = g.entity_by_label.find(fields[2]);
    if (head_it == g.entity_by_label.end())
      throw std::runtime_error("load_graph: " + triples_path + ":" + std::to_string(line_no) +
                               ": unknown entity label '" + fields[0] + "'");
    if (tail_it == g.entity_by_label.end())
      throw std::runtime_error("load_graph: " + triples_path + ":" + std::to_string(line_no) +
                               ": unknown entity label '" + fields[2] + "'");
    auto rel_it = rel_by_label.find(fields[1]);
    RelationId rel;
    if (rel_it == rel_by_label.end()) {
      rel = static_cast<RelationId>(g.relation_labels.size());
      rel_by_label.emplace(fields[1], rel);
      g.relation_labels.push_back(fields[1]);
    } else {
      rel = rel_it->second;
    }
    g.triples.push_back(Triple{head_it->second, rel, tail_it->second});
  }

  g.out_triples.assign(g.entities.size(), {});
  g.in_triples.assign(g.entities.size(), {});
  g.degree.assign(g.entities.size(), 0);
  for (size_t i = 0; i < g.triples.size(); ++i) {
    const Triple& t = g.triples[i];
    g.out_triples[t.head].push_back(static_cast<int>(i));
    g.in_triples[t.tail].push_back(static_cast<int>(i));
    g.degree[t.head] += 1;
    g.degree[t.tail] += 1;  // self-loops count twice on purpose
  }
  return g;
}

std::map<EntityId, HopInfo> khop_reach(const KnowledgeGraph& g, const std::set<EntityId>& seeds,
                                       int k) {
  if (k < 1) throw std::invalid_argument("khop_reach: k must be >= 1");
  for (EntityId s : seeds)
    if (s < 0 || s >= g.num_entities())
      throw std::invalid_argument("khop_reach: unknown seed id " + std::to_string(s));

  std::map<EntityId, HopInfo> result;
  std::vector<int> dist(g.entities.size());
  for (EntityId seed : seeds) {
    // BFS over the undirected skeleton, bounded depth k
    std::fill(dist.begin(), dist.end(), -1);
    dist[seed] = 0;
    std::deque<EntityId> frontier{seed};
    while (!frontier.empty()) {
      EntityId cur = frontier.front();
      frontier.pop_front();
      if (dist[cur] == k) continue;
      auto visit = [&](EntityId next) {
        if (dist[next] == -1) {
          dist[next] = dist[cur] + 1;
          frontier.push_back(next);
        }
      };
      for (int ti : g.out_triples[cur]) visit(g.triples[ti].tail);
      for (int ti : g.in_triples[cur]) visit(g.triples[ti].head);
    }
    for (EntityId e = 0; e < g.num_entities(); ++e) {
      if (dist[e] <= 0 || seeds.count(e)) continue;
      auto [it, inserted] = result.try_emplace(e, HopInfo{dist[e], {}});
      if (!inserted) it->second.dist = std::min(it->second.dist, dist[e]);
      it->second.seeds.insert(seed);
    }
  }
  return result;
}

std::vector<Triple> connecting_triples(const KnowledgeGraph& g,
                                       const std::set<EntityId>& nodes) {
  for (EntityId e : nodes)
    if (e < 0 || e >= g.num_entities())
      throw std::invalid_argument("connecting_triples: unknown entity id " + std::to_string(e));
  std::vector<Triple> out;
  for (const Triple& t : g.triples)
    if (nodes.count(t.head) && nodes.count(t.tail)) out.push_back(t);
  return out;
}

}  // namespace kgalign
