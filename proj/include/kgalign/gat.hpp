#ifndef KGALIGN_GAT_HPP
#define KGALIGN_GAT_HPP

#include "kgalign/nn.hpp"
#include "kgalign/subgraph.hpp"

namespace kgalign {

struct GatConfig {
  int layers = 2;
  int dim = 16;       // node embedding size d
  int qk_dim = 8;     // query/key size D
  int msg_hidden = 32;

  void validate() const;
};

// Layer l parameters under "gat.l{l}.": wq/bq read (node ⊕ type), wk/bk read
// (node ⊕ type ⊕ relation), wm1/bm1/wm2/bm2 form the two-layer message MLP,
// wn/bn map the aggregated message before the residual. "gat.type_emb" holds
// one row per NodeKind and "gat.interaction_init" is the interaction node's
// initial state.
void add_gat_params(ParamGroup& g, const GatConfig& cfg, Rng& rng);

int node_type_row(NodeKind kind);

struct AttentionEntry {
  int src;         // node index; -1 for the self term
  RelationId rel;  // SELF for the self term
  double alpha;
};

// attention trace: [layer][node] -> entries, self term first
using GatTrace = std::vector<std::vector<std::vector<AttentionEntry>>>;

// One message-passing layer: every node aggregates from its in-neighbors plus
// itself with softmax attention and is updated with a residual.
std::vector<Tape::Id> gat_layer(Tape& tape, const ParamIds& p, const GatConfig& cfg,
                                int layer_idx, const Subgraph& sg,
                                const std::vector<Tape::Id>& states, RelationId self_rel,
                                std::vector<std::vector<AttentionEntry>>* trace = nullptr);

struct GatForwardResult {
  std::vector<Tape::Id> node_states;  // final states, one per subgraph node
  Tape::Id t_kg;                      // interaction node readout
};

GatForwardResult gat_forward(Tape& tape, const ParamIds& p, const GatConfig& cfg,
                             const Subgraph& sg, const std::vector<Tape::Id>& init_states,
                             RelationId self_rel, GatTrace* trace = nullptr);

// standalone attention weights for one node (spec-level query; builds its own
// tape over a snapshot of node states)
std::vector<AttentionEntry> attention_weights(const ParamGroup& params, const GatConfig& cfg,
                                              int layer_idx, const Subgraph& sg,
                                              const std::vector<Tensor>& node_states,
                                              int node_idx, RelationId self_rel);

}  // namespace kgalign

#endif
