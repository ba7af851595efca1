#include "kgalign/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace kgalign {

namespace {

std::string resolve_path(const std::string& base_dir, const std::string& rel) {
  std::filesystem::path p(rel);
  if (p.is_absolute() || base_dir.empty()) return rel;
  return (std::filesystem::path(base_dir) / p).string();
}

std::vector<EntityId> random_neighbors(const KnowledgeGraph& g,
                                       const std::set<EntityId>& extracted,
                                       const ModelConfig& cfg, const std::string& sample_id) {
  SelectionConfig pool_cfg = cfg.selection;
  pool_cfg.min_shared_seeds = 1;  // any hop-k neighbor is fair game
  auto reach = khop_reach(g, extracted, pool_cfg.hop_k);
  std::vector<EntityId> pool;
  for (const auto& [e, info] : reach) pool.push_back(e);
  Rng rng(fnv1a64(sample_id, cfg.selection_seed ^ 0x9e3779b97f4a7c15ull));
  rng.shuffle(pool);
  if (static_cast<int>(pool.size()) > cfg.selection.top_k)
    pool.resize(static_cast<size_t>(cfg.selection.top_k));
  return pool;
}

}  // namespace

PreparedSample prepare_sample(const KnowledgeGraph& g, const Sample& s, const NliScorer& scorer,
                              const ModelConfig& cfg, const std::string& base_dir,
                              const std::map<std::string, Tensor>* precomputed_text) {
  PreparedSample ps;
  ps.sample = s;
  ps.extracted = std::set<EntityId>(s.entities.begin(), s.entities.end());

  if (cfg.selection_mode == "nli") {
    ps.candidates = candidate_neighbors(g, ps.extracted, cfg.selection);
    ps.selected = select_by_degree(ps.candidates, cfg.selection.top_k);
    ps.kept = nli_filter(g, s.text, ps.extracted, ps.selected, scorer, cfg.selection,
                         &ps.nli_scores);
  } else if (cfg.selection_mode == "random") {
    ps.kept = random_neighbors(g, ps.extracted, cfg, s.id);
  }
  ps.subgraph = build_subgraph(g, ps.extracted, ps.kept);

  ps.image = load_image_features(resolve_path(base_dir, s.image_features), s.id);

  if (cfg.text_provider == "file") {
    if (!precomputed_text)
      throw std::runtime_error("prepare_sample: text_provider=file but no vectors supplied");
    auto it = precomputed_text->find(s.id);
    if (it == precomputed_text->end())
      throw std::runtime_error("prepare_sample: no precomputed text vector for sample '" +
                               s.id + "'");
    if (it->second.cols != cfg.dim)
      throw std::runtime_error("prepare_sample: precomputed text vector for '" + s.id +
                               "' has dim " + std::to_string(it->second.cols));
    ps.precomputed_text = it->second;
  }
  return ps;
}

std::vector<PreparedSample> prepare_dataset(const KnowledgeGraph& g,
                                            const std::vector<Sample>& samples,
                                            const NliScorer& scorer, const ModelConfig& cfg,
                                            const std::string& base_dir,
                                            std::vector<std::string>* warnings,
                                            const std::map<std::string, Tensor>* precomputed_text) {
  std::vector<PreparedSample> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) {
    try {
      out.push_back(prepare_sample(g, s, scorer, cfg, base_dir, precomputed_text));
    } catch (const NliScorerError& e) {
      if (warnings)
        warnings->push_back("sample '" + s.id + "' skipped: NLI filtering failed: " + e.what());
    }
  }
  return out;
}

ForwardOut forward_sample(Tape& tape, const ParamIds& params, const ModelConfig& cfg,
                          const KnowledgeGraph& g, const PreparedSample& ps,
                          ForwardTrace* trace) {
  // text branch
  Tape::Id t_txt;
  if (cfg.text_provider == "file") {
    t_txt = tape.input(ps.precomputed_text);
  } else {
    t_txt = encode_text(tape, params, cfg.text, ps.sample.tokens).t_txt;
  }

  // image branch
  ImageEncodeResult img = encode_image(tape, params, cfg.img, ps.image);
  Tape::Id img_context = cfg.fusion_pooled_only ? img.t_img : img.tokens;

  Tape::Id fused;
  if (cfg.use_kg) {
    // knowledge branch: description-encoded entity nodes, learned
    // interaction seed, typed GAT, interaction readout
    std::vector<Tape::Id> init_states;
    init_states.reserve(ps.subgraph.nodes.size());
    for (const auto& node : ps.subgraph.nodes) {
      if (node.kind == NodeKind::Interaction) {
        init_states.push_back(params.at("gat.interaction_init"));
      } else {
        init_states.push_back(
            encode_description(tape, params, cfg.kg_encoder, g.entities[node.entity].desc));
      }
    }
    GatForwardResult kg = gat_forward(tape, params, cfg.gat, ps.subgraph, init_states,
                                      g.self_relation(), trace ? &trace->gat_alphas : nullptr);
    Tape::Id kg_context = cfg.fusion_pooled_only ? kg.t_kg : tape.concat_rows(kg.node_states);
    FuseResult fr = fuse(tape, params, t_txt, kg_context, img_context);
    fused = fr.t_fused;
    if (trace) {
      trace->fusion_stage1 = std::move(fr.stage1_alpha);
      trace->fusion_stage2 = std::move(fr.stage2_alpha);
    }
  } else {
    // text+image ablation: only the second fusion stage runs
    CrossAttendResult s2 = cross_attend(tape, params, "fusion.s2.", t_txt, img_context);
    fused = s2.out;
    if (trace) trace->fusion_stage2 = std::move(s2.alpha);
  }

  ForwardOut out;
  out.logits = classify_logits(tape, params, fused);
  out.probs = tape.softmax_rows(out.logits);
  if (trace) {
    trace->p_real = tape.val(out.probs).at(0, 0);
    trace->p_fake = tape.val(out.probs).at(0, 1);
  }
  return out;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (phase1_epochs < 0 || phase2_epochs < 0)
    throw std::invalid_argument("train: phase epochs must be >= 0");
  if (lr_decay_period < 1) throw std::invalid_argument("train: lr_decay_period must be >= 1");
}

namespace {

double run_epoch(ParamGroup& model, const KnowledgeGraph& g,
                 const std::vector<PreparedSample>& train_set, const ModelConfig& cfg,
                 const TrainConfig& tc, double lr, bool freeze_knowledge, Rng& shuffle_rng) {
  std::vector<int> order(train_set.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  shuffle_rng.shuffle(order);

  AdamConfig adam = tc.adam;
  adam.lr = lr;
  auto keep = [&](const std::string& name) {
    return !freeze_knowledge || !in_knowledge_group(name);
  };

  double loss_sum = 0.0;
  int loss_count = 0;
  for (size_t start = 0; start < order.size(); start += tc.batch_size) {
    size_t end = std::min(order.size(), start + tc.batch_size);
    Tape tape;
    ParamIds ids = register_params(tape, model);
    std::vector<Tape::Id> losses;
    for (size_t i = start; i < end; ++i) {
      const PreparedSample& ps = train_set[order[i]];
      ForwardOut fo = forward_sample(tape, ids, cfg, g, ps);
      losses.push_back(ce_loss(tape, fo.logits, ps.sample.label));
    }
    Tape::Id batch_loss = tape.mean_all(tape.concat_rows(losses));
    loss_sum += tape.val(batch_loss).item() * static_cast<double>(end - start);
    loss_count += static_cast<int>(end - start);
    tape.backward(batch_loss);
    adam_step(model, collect_grads(tape, ids, keep), adam);
  }
  return loss_count == 0 ? 0.0 : loss_sum / loss_count;
}

}  // namespace

std::vector<EpochLog> train(ParamGroup& model, const KnowledgeGraph& g,
                            const std::vector<PreparedSample>& train_set,
                            const std::vector<PreparedSample>& eval_set, const ModelConfig& cfg,
                            const TrainConfig& tc) {
  tc.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty dataset");
  const std::vector<PreparedSample>& monitor = eval_set.empty() ? train_set : eval_set;

  Rng shuffle_rng(tc.seed, "train_shuffle");
  std::vector<EpochLog> log;
  int global_epoch = 0;
  for (int e = 0; e < tc.phase1_epochs; ++e, ++global_epoch) {
    double lr = lr_schedule(tc.base_lr, e, tc.lr_decay, tc.lr_decay_period);
    double loss = run_epoch(model, g, train_set, cfg, tc, lr, /*freeze=*/true, shuffle_rng);
    Metrics m = evaluate(model, g, monitor, cfg);
    log.push_back({global_epoch, 1, lr, loss, m.accuracy, m.f1});
  }
  for (int e = 0; e < tc.phase2_epochs; ++e, ++global_epoch) {
    double loss =
        run_epoch(model, g, train_set, cfg, tc, tc.phase2_lr, /*freeze=*/false, shuffle_rng);
    Metrics m = evaluate(model, g, monitor, cfg);
    log.push_back({global_epoch, 2, tc.phase2_lr, loss, m.accuracy, m.f1});
  }
  return log;
}

Metrics evaluate(const ParamGroup& model, const KnowledgeGraph& g,
                 const std::vector<PreparedSample>& samples, const ModelConfig& cfg,
                 double* mean_loss) {
  if (samples.empty()) throw std::invalid_argument("evaluate: empty dataset");
  int tp = 0, fp = 0, fn = 0, tn = 0;
  double loss_sum = 0.0;
  for (const PreparedSample& ps : samples) {
    Tape tape;
    ParamIds ids = register_params(tape, model);
    ForwardOut fo = forward_sample(tape, ids, cfg, g, ps);
    double p_fake = tape.val(fo.probs).at(0, 1);
    loss_sum += tape.val(ce_loss(tape, fo.logits, ps.sample.label)).item();
    bool pred_fake = p_fake > 0.5;
    bool is_fake = ps.sample.label == kLabelFake;
    if (pred_fake && is_fake) ++tp;
    else if (pred_fake && !is_fake) ++fp;
    else if (!pred_fake && is_fake) ++fn;
    else ++tn;
  }
  if (mean_loss) *mean_loss = loss_sum / static_cast<double>(samples.size());
  return metrics_from_confusion(tp, fp, fn, tn);
}

void write_epoch_log(const std::string& path, const std::vector<EpochLog>& log) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("train log: cannot write '" + path + "'");
  os << "epoch,phase,lr,train_loss,eval_acc,eval_f1\n";
  os.precision(12);
  for (const auto& row : log)
    os << row.epoch << "," << row.phase << "," << row.lr << "," << row.train_loss << ","
       << row.eval_acc << "," << row.eval_f1 << "\n";
}

}  // namespace kgalign
