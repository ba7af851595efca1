#include "kgalign/gat.hpp"

#include <cmath>
#include <stdexcept>

namespace kgalign {

void GatConfig::validate() const {
  if (layers < 1) throw std::invalid_argument("gat: layers must be >= 1");
  if (dim < 1 || qk_dim < 1 || msg_hidden < 1)
    throw std::invalid_argument("gat: dims must be positive");
}

void add_gat_params(ParamGroup& g, const GatConfig& cfg, Rng& rng) {
  cfg.validate();
  for (int l = 0; l < cfg.layers; ++l) {
    std::string lp = "gat.l" + std::to_string(l) + ".";
    g.add(lp + "wq", matrix_param(2 * cfg.dim, cfg.qk_dim, rng));
    g.add(lp + "bq", Tensor::zeros(1, cfg.qk_dim));
    g.add(lp + "wk", matrix_param(3 * cfg.dim, cfg.qk_dim, rng));
    g.add(lp + "bk", Tensor::zeros(1, cfg.qk_dim));
    g.add(lp + "wm1", matrix_param(3 * cfg.dim, cfg.msg_hidden, rng));
    g.add(lp + "bm1", Tensor::zeros(1, cfg.msg_hidden));
    g.add(lp + "wm2", matrix_param(cfg.msg_hidden, cfg.dim, rng));
    g.add(lp + "bm2", Tensor::zeros(1, cfg.dim));
    g.add(lp + "wn", matrix_param(cfg.dim, cfg.dim, rng));
    g.add(lp + "bn", Tensor::zeros(1, cfg.dim));
  }
  // unit-scale type rows: node-kind conditioning should be visible to the
  // key/message maps from the first step, not something training must grow
  Tensor type_emb(3, cfg.dim);
  for (auto& x : type_emb.data) x = rng.uniform(-1.0, 1.0);
  g.add("gat.type_emb", type_emb);
  g.add("gat.interaction_init", table_param(1, cfg.dim, rng));
}

int node_type_row(NodeKind kind) {
  switch (kind) {
    case NodeKind::Extracted: return 0;
    case NodeKind::Neighbor: return 1;
    case NodeKind::Interaction: return 2;
  }
  return 0;
}

namespace {

struct NodeKeys {
  std::vector<std::pair<int, RelationId>> sources;  // self first
  Tape::Id alpha;                                   // 1 x |sources|
  Tape::Id messages;                                // |sources| x d
};

// attention + messages for node j: self term with the reserved SELF relation,
// then one entry per incoming edge in edge order
NodeKeys node_keys(Tape& tape, const ParamIds& p, const GatConfig& cfg, int layer_idx,
                   const Subgraph& sg, const std::vector<Tape::Id>& states,
                   const std::vector<std::vector<int>>& in_edges, int j, RelationId self_rel) {
  const std::string lp = "gat.l" + std::to_string(layer_idx) + ".";
  Tape::Id type_emb = p.at("gat.type_emb");
  Tape::Id rel_emb = p.at("relation_emb");

  auto type_of = [&](int node) {
    return tape.gather_rows(type_emb, {node_type_row(sg.nodes[node].kind)});
  };

  NodeKeys out;
  Tape::Id q = affine(tape, p, tape.concat_cols(states[j], type_of(j)), lp + "wq", lp + "bq");

  std::vector<Tape::Id> keys, msgs;
  auto push_source = [&](int src, RelationId rel) {
    Tape::Id rel_row = tape.gather_rows(rel_emb, {rel});
    Tape::Id feats = tape.concat_cols(tape.concat_cols(states[src], type_of(src)), rel_row);
    keys.push_back(affine(tape, p, feats, lp + "wk", lp + "bk"));
    Tape::Id hidden = tape.relu(affine(tape, p, feats, lp + "wm1", lp + "bm1"));
    msgs.push_back(affine(tape, p, hidden, lp + "wm2", lp + "bm2"));
    out.sources.emplace_back(src == j && rel == self_rel ? -1 : src, rel);
  };

  push_source(j, self_rel);
  for (int ei : in_edges[j]) push_source(sg.edges[ei].src, sg.edges[ei].rel);

  Tape::Id key_mat = tape.concat_rows(keys);
  Tape::Id scores =
      tape.scale(tape.matmul(q, key_mat, false, true), 1.0 / std::sqrt(double(cfg.qk_dim)));
  out.alpha = tape.softmax_rows(scores);
  out.messages = tape.concat_rows(msgs);
  return out;
}

}  // namespace

std::vector<Tape::Id> gat_layer(Tape& tape, const ParamIds& p, const GatConfig& cfg,
                                int layer_idx, const Subgraph& sg,
                                const std::vector<Tape::Id>& states, RelationId self_rel,
                                std::vector<std::vector<AttentionEntry>>* trace) {
  if (static_cast<int>(states.size()) != sg.num_nodes())
    throw std::invalid_argument("gat_layer: one state per node required");
  const std::string lp = "gat.l" + std::to_string(layer_idx) + ".";
  auto in_edges = sg.in_edges();
  std::vector<Tape::Id> next(states.size());
  for (int j = 0; j < sg.num_nodes(); ++j) {
    NodeKeys nk = node_keys(tape, p, cfg, layer_idx, sg, states, in_edges, j, self_rel);
    if (trace) {
      std::vector<AttentionEntry> entries;
      const Tensor& a = tape.val(nk.alpha);
      for (size_t s = 0; s < nk.sources.size(); ++s)
        entries.push_back({nk.sources[s].first, nk.sources[s].second, a.data[s]});
      trace->push_back(std::move(entries));
    }
    Tape::Id agg = tape.matmul(nk.alpha, nk.messages);
    next[j] = tape.add(affine(tape, p, agg, lp + "wn", lp + "bn"), states[j]);
  }
  return next;
}

GatForwardResult gat_forward(Tape& tape, const ParamIds& p, const GatConfig& cfg,
                             const Subgraph& sg, const std::vector<Tape::Id>& init_states,
                             RelationId self_rel, GatTrace* trace) {
  cfg.validate();
  std::vector<Tape::Id> states = init_states;
  for (int l = 0; l < cfg.layers; ++l) {
    if (trace) trace->emplace_back();
    states = gat_layer(tape, p, cfg, l, sg, states, self_rel,
                       trace ? &trace->back() : nullptr);
  }
  return {states, states[sg.interaction_index]};
}

std::vector<AttentionEntry> attention_weights(const ParamGroup& params, const GatConfig& cfg,
                                              int layer_idx, const Subgraph& sg,
                                              const std::vector<Tensor>& node_states,
                                              int node_idx, RelationId self_rel) {
  Tape tape;
  ParamIds ids = register_params(tape, params);
  std::vector<Tape::Id> states;
  for (const Tensor& t : node_states) states.push_back(tape.input(t));
  std::vector<std::vector<AttentionEntry>> trace;
  gat_layer(tape, ids, cfg, layer_idx, sg, states, self_rel, &trace);
  return trace.at(static_cast<size_t>(node_idx));
}

}  // namespace kgalign
