#include "kgalign/kg_encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace kgalign {

void EncoderConfig::validate() const {
  transformer().validate("kg_encoder");
  if (vocab_size < 3) throw std::invalid_argument("kg_encoder: vocab too small");
  if (max_len < 2) throw std::invalid_argument("kg_encoder: max_len must allow CLS + 1 token");
  if (mask_prob <= 0.0 || mask_prob >= 1.0)
    throw std::invalid_argument("kg_encoder: mask_prob must be in (0, 1)");
  if (margin <= 0.0) throw std::invalid_argument("kg_encoder: margin must be positive");
  if (negatives < 1) throw std::invalid_argument("kg_encoder: negatives must be >= 1");
}

void add_kg_encoder_params(ParamGroup& g, const EncoderConfig& cfg, Rng& rng) {
  cfg.validate();
  g.add("kg_encoder.tok_emb", table_param(cfg.vocab_size, cfg.dim, rng));
  g.add("kg_encoder.pos_emb", table_param(cfg.max_len, cfg.dim, rng));
  add_transformer_params(g, "kg_encoder.enc", cfg.transformer(), rng);
  g.add("kg_encoder.mlm_w", matrix_param(cfg.dim, cfg.vocab_size, rng));
  g.add("kg_encoder.mlm_b", Tensor::zeros(1, cfg.vocab_size));
}

void add_relation_embeddings(ParamGroup& g, int num_relations, int dim, Rng& rng) {
  g.add("relation_emb", table_param(num_relations, dim, rng));
}

std::vector<int> clamp_tokens(const std::vector<int>& tokens, int max_len) {
  std::vector<int> seq;
  seq.reserve(static_cast<size_t>(max_len));
  seq.push_back(Vocab::kCls);
  for (int t : tokens) {
    if (static_cast<int>(seq.size()) >= max_len) break;
    seq.push_back(t);
  }
  return seq;
}

namespace {

// token + positional embeddings, then the encoder stack
Tape::Id encoder_hidden(Tape& tape, const ParamIds& p, const EncoderConfig& cfg,
                        const std::vector<int>& seq) {
  std::vector<int> positions(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) positions[i] = static_cast<int>(i);
  Tape::Id x = tape.add(tape.gather_rows(p.at("kg_encoder.tok_emb"), seq),
                        tape.gather_rows(p.at("kg_encoder.pos_emb"), positions));
  return transformer_forward(tape, p, "kg_encoder.enc", cfg.transformer(), x);
}

}  // namespace

Tape::Id encode_description(Tape& tape, const ParamIds& p, const EncoderConfig& cfg,
                            const std::vector<int>& tokens) {
  if (tokens.empty()) throw std::invalid_argument("encode_description: empty token sequence");
  Tape::Id h = encoder_hidden(tape, p, cfg, clamp_tokens(tokens, cfg.max_len));
  return tape.gather_rows(h, {0});
}

Tape::Id mlm_loss(Tape& tape, const ParamIds& p, const EncoderConfig& cfg,
                  const std::vector<std::vector<int>>& batch, Rng& rng) {
  if (batch.empty()) throw std::invalid_argument("mlm_loss: empty batch");
  std::vector<Tape::Id> losses;
  for (const auto& tokens : batch) {
    if (tokens.empty()) throw std::invalid_argument("mlm_loss: empty token sequence");
    std::vector<int> seq = clamp_tokens(tokens, cfg.max_len);
    const int n = static_cast<int>(seq.size());
    std::vector<int> masked_pos;
    for (int i = 1; i < n; ++i)
      if (rng.bernoulli(cfg.mask_prob)) masked_pos.push_back(i);
    if (masked_pos.empty() && n > 1) masked_pos.push_back(1 + rng.uniform_int(n - 1));
    if (masked_pos.empty()) continue;  // CLS-only sequence, nothing to predict

    std::vector<int> corrupted = seq;
    std::vector<int> targets;
    for (int pos : masked_pos) {
      targets.push_back(seq[pos]);
      corrupted[pos] = Vocab::kMask;
    }
    Tape::Id h = encoder_hidden(tape, p, cfg, corrupted);
    Tape::Id picked = tape.gather_rows(h, masked_pos);
    Tape::Id logits = affine(tape, p, picked, "kg_encoder.mlm_w", "kg_encoder.mlm_b");
    losses.push_back(tape.cross_entropy_logits(logits, targets));
  }
  if (losses.empty()) throw std::invalid_argument("mlm_loss: no maskable positions in batch");
  return tape.mean_all(tape.concat_rows(losses));
}

Tape::Id kg_triplet_loss(Tape& tape, const ParamIds& p, const EncoderConfig& cfg,
                         const KnowledgeGraph& g, const std::vector<Triple>& positives,
                         Rng& rng) {
  if (positives.empty()) throw std::invalid_argument("kg_triplet_loss: empty batch");
  if (g.num_entities() < 2)
    throw std::invalid_argument("kg_triplet_loss: need at least 2 entities to corrupt");

  std::map<EntityId, Tape::Id> embedded;  // one encode per entity per step
  auto embed = [&](EntityId e) {
    auto it = embedded.find(e);
    if (it != embedded.end()) return it->second;
    Tape::Id id = encode_description(tape, p, cfg, g.entities[e].desc);
    embedded.emplace(e, id);
    return id;
  };
  auto corrupt = [&](EntityId original) {
    EntityId pick = rng.uniform_int(g.num_entities() - 1);
    if (pick >= original) ++pick;
    return pick;
  };

  std::vector<Tape::Id> losses;
  for (const Triple& t : positives) {
    Tape::Id rel = tape.gather_rows(p.at("relation_emb"), {t.relation});
    Tape::Id pos_dist =
        tape.l2_norm(tape.sub(tape.add(embed(t.head), rel), embed(t.tail)));
    for (int n = 0; n < cfg.negatives; ++n) {
      EntityId nh = t.head, nt = t.tail;
      if (rng.bernoulli(0.5)) {
        nh = corrupt(t.head);
      } else {
        nt = corrupt(t.tail);
      }
      Tape::Id neg_dist = tape.l2_norm(tape.sub(tape.add(embed(nh), rel), embed(nt)));
      losses.push_back(triplet_hinge(tape, pos_dist, neg_dist, cfg.margin));
    }
  }
  return tape.mean_all(tape.concat_rows(losses));
}

Tape::Id triplet_hinge(Tape& tape, Tape::Id pos_dist, Tape::Id neg_dist, double margin) {
  return tape.hinge(tape.add_scalar(tape.sub(pos_dist, neg_dist), margin));
}

Tape::Id joint_loss(Tape& tape, const EncoderConfig& cfg, Tape::Id mlm, Tape::Id kg) {
  return tape.add(tape.scale(mlm, cfg.mlm_weight), tape.scale(kg, cfg.kg_weight));
}

ParamGroup train_encoder(const KnowledgeGraph& g, const EncoderConfig& cfg,
                         const PretrainConfig& pt, std::vector<PretrainStepLog>* log) {
  for (const auto& e : g.entities)
    if (e.desc.empty())
      throw std::invalid_argument("train_encoder: entity '" + e.label + "' has no description");

  Rng init_rng(pt.seed, "kg_encoder_init");
  ParamGroup group;
  add_kg_encoder_params(group, cfg, init_rng);
  add_relation_embeddings(group, g.num_relations(), cfg.dim, init_rng);

  Rng sample_rng(pt.seed, "kg_encoder_steps");
  AdamConfig adam = pt.adam;
  adam.lr = pt.lr;
  for (int step = 0; step < pt.steps; ++step) {
    Tape tape;
    ParamIds ids = register_params(tape, group);

    std::vector<std::vector<int>> mlm_batch;
    for (int i = 0; i < pt.mlm_batch; ++i)
      mlm_batch.push_back(g.entities[sample_rng.uniform_int(g.num_entities())].desc);
    Tape::Id l_mlm = mlm_loss(tape, ids, cfg, mlm_batch, sample_rng);

    Tape::Id l_kg;
    bool has_kg = !g.triples.empty();
    if (has_kg) {
      std::vector<Triple> kg_batch;
      for (int i = 0; i < pt.kg_batch; ++i)
        kg_batch.push_back(g.triples[sample_rng.uniform_int(static_cast<int>(g.triples.size()))]);
      l_kg = kg_triplet_loss(tape, ids, cfg, g, kg_batch, sample_rng);
    } else {
      l_kg = tape.input(Tensor::scalar(0.0));
    }

    Tape::Id total = joint_loss(tape, cfg, l_mlm, l_kg);
    if (log)
      log->push_back({step, tape.val(l_mlm).item(), tape.val(l_kg).item(),
                      tape.val(total).item()});
    tape.backward(total);
    adam_step(group, collect_grads(tape, ids), adam);
  }
  return group;
}

double transe_distance(const Tensor& head, const Tensor& rel, const Tensor& tail) {
  double s = 0.0;
  for (int i = 0; i < head.size(); ++i) {
    double d = head.data[i] + rel.data[i] - tail.data[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace kgalign
