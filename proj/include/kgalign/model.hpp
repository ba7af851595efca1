#ifndef KGALIGN_MODEL_HPP
#define KGALIGN_MODEL_HPP

#include "kgalign/fusion.hpp"
#include "kgalign/gat.hpp"
#include "kgalign/kg_encoder.hpp"
#include "kgalign/modality.hpp"

namespace kgalign {

// Full-model configuration. One shared model dimension ties the encoders,
// the GAT and the fusion stages together.
struct ModelConfig {
  int dim = 16;
  EncoderConfig kg_encoder;
  GatConfig gat;
  TextEncoderConfig text;
  ImageEncoderConfig img;
  SelectionConfig selection;

  // nli (degree selection + NLI filter), random (uniform neighbors, no
  // filtering) or none (no neighbors)
  std::string selection_mode = "nli";
  uint64_t selection_seed = 0;  // extra entropy for random mode

  bool fusion_pooled_only = false;  // literal pooled-vector fusion contexts
  bool use_kg = true;               // ablation: text+image only
  std::string text_provider = "toy";  // toy | file (precomputed T_txt)

  void validate() const;
};

// Initializes every trainable group: kg encoder, relation embeddings, GAT,
// text/image encoders, fusion stages and the classifier.
ParamGroup init_model_params(const ModelConfig& cfg, int vocab_size, int num_relations,
                             uint64_t seed);

// parameter prefixes frozen during training phase 1
bool in_knowledge_group(const std::string& param_name);

// replaces matching parameters with checkpoint values; unknown names and
// shape mismatches are errors
void overlay_checkpoint(ParamGroup& model, const std::map<std::string, Tensor>& loaded);

}  // namespace kgalign

#endif
