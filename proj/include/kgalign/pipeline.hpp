#ifndef KGALIGN_PIPELINE_HPP
#define KGALIGN_PIPELINE_HPP

#include "kgalign/dataset.hpp"
#include "kgalign/metrics.hpp"
#include "kgalign/model.hpp"

namespace kgalign {

// Selection chain and feature loading are parameter-free, so they run once
// per sample at ingestion and the result is reused across epochs.
struct PreparedSample {
  Sample sample;
  std::set<EntityId> extracted;
  std::vector<std::pair<EntityId, int>> candidates;  // (entity, degree)
  std::vector<EntityId> selected;                    // after degree selection
  std::vector<NeighborNliScore> nli_scores;
  std::vector<EntityId> kept;
  Subgraph subgraph;
  ImageFeatures image;
  Tensor precomputed_text;  // 1 x d when text_provider == "file", else empty
};

PreparedSample prepare_sample(const KnowledgeGraph& g, const Sample& s, const NliScorer& scorer,
                              const ModelConfig& cfg, const std::string& base_dir,
                              const std::map<std::string, Tensor>* precomputed_text = nullptr);

// Applies prepare_sample to a dataset; samples whose NLI scorer fails are
// skipped with a warning, anything else propagates.
std::vector<PreparedSample> prepare_dataset(const KnowledgeGraph& g,
                                            const std::vector<Sample>& samples,
                                            const NliScorer& scorer, const ModelConfig& cfg,
                                            const std::string& base_dir,
                                            std::vector<std::string>* warnings = nullptr,
                                            const std::map<std::string, Tensor>* precomputed_text = nullptr);

struct ForwardTrace {
  GatTrace gat_alphas;
  std::vector<double> fusion_stage1;
  std::vector<double> fusion_stage2;
  double p_real = 0.0;
  double p_fake = 0.0;
};

struct ForwardOut {
  Tape::Id logits;  // 1 x 2
  Tape::Id probs;   // 1 x 2, (p_real, p_fake)
};

// selection -> subgraph -> GAT -> encoders -> fusion -> classifier
ForwardOut forward_sample(Tape& tape, const ParamIds& params, const ModelConfig& cfg,
                          const KnowledgeGraph& g, const PreparedSample& ps,
                          ForwardTrace* trace = nullptr);

struct TrainConfig {
  int batch_size = 16;
  int phase1_epochs = 30;  // knowledge encoder + relation embeddings frozen
  int phase2_epochs = 20;  // everything fine-tuned at phase2_lr
  double base_lr = 5e-4;
  double phase2_lr = 1e-6;
  double lr_decay = 0.1;
  int lr_decay_period = 3;
  uint64_t seed = 1;
  AdamConfig adam;

  void validate() const;
};

struct EpochLog {
  int epoch;  // global epoch index
  int phase;  // 1 or 2
  double lr;
  double train_loss;
  double eval_acc;
  double eval_f1;
};

// Two-phase supervised training. Evaluation metrics per epoch come from
// eval_set when present, otherwise from the training set.
std::vector<EpochLog> train(ParamGroup& model, const KnowledgeGraph& g,
                            const std::vector<PreparedSample>& train_set,
                            const std::vector<PreparedSample>& eval_set, const ModelConfig& cfg,
                            const TrainConfig& tc);

// threshold 0.5 on p_fake, fake is the positive class
Metrics evaluate(const ParamGroup& model, const KnowledgeGraph& g,
                 const std::vector<PreparedSample>& samples, const ModelConfig& cfg,
                 double* mean_loss = nullptr);

void write_epoch_log(const std::string& path, const std::vector<EpochLog>& log);

}  // namespace kgalign

#endif
