#include "kgalign/model.hpp"

namespace kgalign {

void ModelConfig::validate() const {
  if (dim < 2) throw std::invalid_argument("model: dim too small");
  if (kg_encoder.dim != dim || gat.dim != dim || text.dim != dim || img.dim != dim)
    throw std::invalid_argument("model: all component dims must equal model.dim");
  kg_encoder.validate();
  gat.validate();
  text.transformer().validate("text_encoder");
  img.transformer().validate("img_encoder");
  selection.validate();
  if (selection_mode != "nli" && selection_mode != "random" && selection_mode != "none")
    throw std::invalid_argument("model: selection_mode must be nli, random or none");
  if (text_provider != "toy" && text_provider != "file")
    throw std::invalid_argument("model: text_provider must be toy or file");
}

ParamGroup init_model_params(const ModelConfig& cfg, int vocab_size, int num_relations,
                             uint64_t seed) {
  ModelConfig c = cfg;
  c.kg_encoder.vocab_size = vocab_size;
  c.text.vocab_size = vocab_size;
  c.validate();

  ParamGroup group;
  // each subsystem draws from its own named stream so adding one does not
  // reshuffle the others
  Rng kg_rng(seed, "kg_encoder_init");
  add_kg_encoder_params(group, c.kg_encoder, kg_rng);
  add_relation_embeddings(group, num_relations, c.dim, kg_rng);
  Rng gat_rng(seed, "gat_init");
  add_gat_params(group, c.gat, gat_rng);
  Rng text_rng(seed, "text_init");
  add_text_params(group, c.text, text_rng);
  Rng img_rng(seed, "img_init");
  add_image_params(group, c.img, img_rng);
  Rng fusion_rng(seed, "fusion_init");
  add_fusion_params(group, c.dim, fusion_rng);
  return group;
}

bool in_knowledge_group(const std::string& param_name) {
  return param_name.rfind("kg_encoder.", 0) == 0 || param_name.rfind("relation_emb", 0) == 0;
}

void overlay_checkpoint(ParamGroup& model, const std::map<std::string, Tensor>& loaded) {
  for (const auto& [name, t] : loaded) {
    if (!model.has(name))
      throw std::runtime_error("checkpoint overlay: model has no parameter '" + name + "'");
    Tensor& dst = model.at(name);
    if (!dst.same_shape(t))
      throw std::runtime_error("checkpoint overlay: shape mismatch for '" + name + "': model " +
                               dst.shape_str() + " vs checkpoint " + t.shape_str());
    dst = t;
  }
}

}  // namespace kgalign
