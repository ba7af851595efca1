#include "kgalign/config.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace kgalign {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open '" + path + "'");
  Config c;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: " + path + ":" + std::to_string(line_no) +
                               ": expected key = value");
    c.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return c;
}

void Config::apply_override(const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::runtime_error("config override must look like key=value, got '" + kv + "'");
  values_[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
}

std::string Config::get(const std::string& key, const std::string& def) const {
  auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

int Config::get_int(const std::string& key, int def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config: key '" + key + "' is not an integer: " + it->second);
  }
}

double Config::get_double(const std::string& key, double def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config: key '" + key + "' is not a number: " + it->second);
  }
}

bool Config::get_bool(const std::string& key, bool def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::runtime_error("config: key '" + key + "' is not a boolean: " + it->second);
}

uint64_t Config::get_u64(const std::string& key, uint64_t def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw std::runtime_error("config: key '" + key + "' is not an integer: " + it->second);
  }
}

ModelConfig model_config_from(const Config& c) {
  ModelConfig m;
  m.dim = c.get_int("model.dim", m.dim);

  m.kg_encoder.dim = m.dim;
  m.kg_encoder.layers = c.get_int("model.kg_layers", m.kg_encoder.layers);
  m.kg_encoder.heads = c.get_int("model.kg_heads", m.kg_encoder.heads);
  m.kg_encoder.ffn_hidden = c.get_int("model.kg_ffn_hidden", 2 * m.dim);
  m.kg_encoder.max_len = c.get_int("model.kg_max_desc_len", m.kg_encoder.max_len);
  m.kg_encoder.mask_prob = c.get_double("model.mask_prob", m.kg_encoder.mask_prob);
  m.kg_encoder.margin = c.get_double("model.margin", m.kg_encoder.margin);
  m.kg_encoder.negatives = c.get_int("model.negatives", m.kg_encoder.negatives);
  m.kg_encoder.mlm_weight = c.get_double("model.mlm_weight", m.kg_encoder.mlm_weight);
  m.kg_encoder.kg_weight = c.get_double("model.kg_weight", m.kg_encoder.kg_weight);

  m.gat.dim = m.dim;
  m.gat.layers = c.get_int("model.gat_layers", m.gat.layers);
  m.gat.qk_dim = c.get_int("model.qk_dim", m.gat.qk_dim);
  m.gat.msg_hidden = c.get_int("model.gat_msg_hidden", 2 * m.dim);

  m.text.dim = m.dim;
  m.text.layers = c.get_int("model.text_layers", m.text.layers);
  m.text.heads = c.get_int("model.text_heads", m.text.heads);
  m.text.ffn_hidden = c.get_int("model.text_ffn_hidden", 2 * m.dim);
  m.text.max_len = c.get_int("model.text_max_len", m.text.max_len);

  m.img.dim = m.dim;
  m.img.layers = c.get_int("model.img_layers", m.img.layers);
  m.img.heads = c.get_int("model.img_heads", m.img.heads);
  m.img.ffn_hidden = c.get_int("model.img_ffn_hidden", 2 * m.dim);
  m.img.d_c = c.get_int("model.img_d_c", m.img.d_c);
  m.img.d_o = c.get_int("model.img_d_o", m.img.d_o);
  m.img.cls_slot_marker = c.get_bool("model.img_cls_marker", m.img.cls_slot_marker);

  m.selection.hop_k = c.get_int("selection.hop_k", m.selection.hop_k);
  m.selection.top_k = c.get_int("selection.top_k", m.selection.top_k);
  m.selection.min_shared_seeds = c.get_int("selection.min_shared_seeds", m.selection.min_shared_seeds);
  m.selection.nli_threshold = c.get_double("selection.nli_threshold", m.selection.nli_threshold);
  m.selection_mode = c.get("selection.mode", m.selection_mode);
  m.selection_seed = c.get_u64("selection.seed", m.selection_seed);

  m.fusion_pooled_only = c.get_bool("model.fusion_pooled_only", m.fusion_pooled_only);
  m.use_kg = c.get_bool("model.use_kg", m.use_kg);
  m.text_provider = c.get("model.text_provider", m.text_provider);
  return m;
}

TrainConfig train_config_from(const Config& c) {
  TrainConfig t;
  t.batch_size = c.get_int("train.batch_size", t.batch_size);
  t.phase1_epochs = c.get_int("train.phase1_epochs", t.phase1_epochs);
  t.phase2_epochs = c.get_int("train.phase2_epochs", t.phase2_epochs);
  t.base_lr = c.get_double("train.base_lr", t.base_lr);
  t.phase2_lr = c.get_double("train.phase2_lr", t.phase2_lr);
  t.lr_decay = c.get_double("train.lr_decay", t.lr_decay);
  t.lr_decay_period = c.get_int("train.lr_decay_period", t.lr_decay_period);
  t.seed = c.get_u64("train.seed", t.seed);
  return t;
}

PretrainConfig pretrain_config_from(const Config& c) {
  PretrainConfig p;
  p.steps = c.get_int("pretrain.steps", p.steps);
  p.lr = c.get_double("pretrain.lr", p.lr);
  p.mlm_batch = c.get_int("pretrain.mlm_batch", p.mlm_batch);
  p.kg_batch = c.get_int("pretrain.kg_batch", p.kg_batch);
  p.seed = c.get_u64("pretrain.seed", p.seed);
  return p;
}

}  // namespace kgalign
