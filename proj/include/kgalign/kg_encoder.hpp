#ifndef KGALIGN_KG_ENCODER_HPP
#define KGALIGN_KG_ENCODER_HPP

#include <vector>

#include "kgalign/kg_store.hpp"
#include "kgalign/nn.hpp"

namespace kgalign {

// Entity-description encoder trained jointly on masked language modeling and
// a translation-based triplet objective over the graph structure.
struct EncoderConfig {
  int vocab_size = 0;
  int dim = 16;
  int layers = 1;
  int heads = 2;
  int ffn_hidden = 32;
  int max_len = 16;        // tokens fed to the encoder, CLS included
  double mask_prob = 0.15;
  double margin = 1.0;     // triplet hinge margin
  int negatives = 1;       // corruptions per positive, resampled each step
  double mlm_weight = 1.0;
  double kg_weight = 1.0;

  TransformerConfig transformer() const { return {dim, layers, heads, ffn_hidden}; }
  void validate() const;
};

// parameter prefix "kg_encoder."; relation table lives under "relation_emb"
void add_kg_encoder_params(ParamGroup& g, const EncoderConfig& cfg, Rng& rng);
void add_relation_embeddings(ParamGroup& g, int num_relations, int dim, Rng& rng);

// CLS prepended, then truncated to max_len
std::vector<int> clamp_tokens(const std::vector<int>& tokens, int max_len);

// final-layer hidden state at the CLS position, 1 x d
Tape::Id encode_description(Tape& tape, const ParamIds& p, const EncoderConfig& cfg,
                            const std::vector<int>& tokens);

// mean cross-entropy over masked positions; positions chosen i.i.d. with
// mask_prob, at least one forced per sequence
Tape::Id mlm_loss(Tape& tape, const ParamIds& p, const EncoderConfig& cfg,
                  const std::vector<std::vector<int>>& batch, Rng& rng);

// max(0, margin + pos_dist - neg_dist)
Tape::Id triplet_hinge(Tape& tape, Tape::Id pos_dist, Tape::Id neg_dist, double margin);

// mean over positives of max(0, margin + ||e_h + r - e_t|| - ||e_h' + r - e_t'||),
// one endpoint corrupted per negative with a fair coin
Tape::Id kg_triplet_loss(Tape& tape, const ParamIds& p, const EncoderConfig& cfg,
                         const KnowledgeGraph& g, const std::vector<Triple>& positives,
                         Rng& rng);

// L = mlm_weight * L_MLM + kg_weight * L_KG (defaults 1, 1)
Tape::Id joint_loss(Tape& tape, const EncoderConfig& cfg, Tape::Id mlm, Tape::Id kg);

struct PretrainConfig {
  int steps = 300;
  double lr = 1e-3;
  int mlm_batch = 8;
  int kg_batch = 8;
  uint64_t seed = 1;
  AdamConfig adam;
};

struct PretrainStepLog {
  int step;
  double loss_mlm;
  double loss_kg;
  double loss_total;
};

// Fresh parameters trained on the graph's descriptions and triples. The log
// has one row per step (csv: step,loss_mlm,loss_kg,loss_total).
ParamGroup train_encoder(const KnowledgeGraph& g, const EncoderConfig& cfg,
                         const PretrainConfig& pt, std::vector<PretrainStepLog>* log = nullptr);

// distance used for ranking: ||e_h + r - e_t|| on already-computed embeddings
double transe_distance(const Tensor& head, const Tensor& rel, const Tensor& tail);

}  // namespace kgalign

#endif
