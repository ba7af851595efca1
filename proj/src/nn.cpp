#include "kgalign/nn.hpp"

#include <cmath>

namespace kgalign {

Tensor matrix_param(int in_dim, int out_dim, Rng& rng) {
  // Glorot bound; plain 1/sqrt(fan_in) contracts each map by ~0.6x, which
  // starves the deeper composites (GAT message path) of trainable signal
  double bound = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  Tensor t(in_dim, out_dim);
  for (auto& x : t.data) x = rng.uniform(-bound, bound);
  return t;
}

Tensor table_param(int rows, int d, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(d));
  Tensor t(rows, d);
  for (auto& x : t.data) x = rng.uniform(-bound, bound);
  return t;
}

ParamIds register_params(Tape& tape, const ParamGroup& group) {
  ParamIds ids;
  for (const auto& [name, t] : group.params) ids.emplace(name, tape.input(t));
  return ids;
}

std::map<std::string, Tensor> collect_grads(
    const Tape& tape, const ParamIds& ids,
    const std::function<bool(const std::string&)>& keep) {
  std::map<std::string, Tensor> grads;
  for (const auto& [name, id] : ids) {
    if (keep && !keep(name)) continue;
    grads.emplace(name, tape.grad(id));
  }
  return grads;
}

Tape::Id affine(Tape& tape, const ParamIds& p, Tape::Id x, const std::string& w,
                const std::string& b) {
  return tape.add(tape.matmul(x, p.at(w)), p.at(b));
}

Tape::Id layer_norm_affine(Tape& tape, const ParamIds& p, Tape::Id x, const std::string& gain,
                           const std::string& bias, double eps) {
  return tape.add(tape.mul(tape.layer_norm_rows(x, eps), p.at(gain)), p.at(bias));
}

void TransformerConfig::validate(const std::string& who) const {
  if (dim < 1 || layers < 1 || heads < 1 || ffn_hidden < 1)
    throw std::invalid_argument(who + ": dims and layer/head counts must be positive");
  if (dim % heads != 0)
    throw std::invalid_argument(who + ": dim must be divisible by head count");
}

void add_transformer_params(ParamGroup& g, const std::string& prefix,
                            const TransformerConfig& cfg, Rng& rng) {
  cfg.validate(prefix);
  const int dh = cfg.dim / cfg.heads;
  for (int l = 0; l < cfg.layers; ++l) {
    std::string lp = prefix + ".l" + std::to_string(l) + ".";
    for (int h = 0; h < cfg.heads; ++h) {
      std::string hp = lp + "h" + std::to_string(h) + ".";
      g.add(hp + "wq", matrix_param(cfg.dim, dh, rng));
      g.add(hp + "wk", matrix_param(cfg.dim, dh, rng));
      g.add(hp + "wv", matrix_param(cfg.dim, dh, rng));
    }
    g.add(lp + "wo", matrix_param(cfg.dim, cfg.dim, rng));
    g.add(lp + "bo", Tensor::zeros(1, cfg.dim));
    g.add(lp + "ln1_g", Tensor::full(1, cfg.dim, 1.0));
    g.add(lp + "ln1_b", Tensor::zeros(1, cfg.dim));
    g.add(lp + "ffn_w1", matrix_param(cfg.dim, cfg.ffn_hidden, rng));
    g.add(lp + "ffn_b1", Tensor::zeros(1, cfg.ffn_hidden));
    g.add(lp + "ffn_w2", matrix_param(cfg.ffn_hidden, cfg.dim, rng));
    g.add(lp + "ffn_b2", Tensor::zeros(1, cfg.dim));
    g.add(lp + "ln2_g", Tensor::full(1, cfg.dim, 1.0));
    g.add(lp + "ln2_b", Tensor::zeros(1, cfg.dim));
  }
}

Tape::Id transformer_forward(Tape& tape, const ParamIds& p, const std::string& prefix,
                             const TransformerConfig& cfg, Tape::Id x, AttentionTrace* trace) {
  const int dh = cfg.dim / cfg.heads;
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));
  if (trace) trace->attn.assign(static_cast<size_t>(cfg.layers), {});
  for (int l = 0; l < cfg.layers; ++l) {
    std::string lp = prefix + ".l" + std::to_string(l) + ".";
    std::vector<Tape::Id> head_outs;
    for (int h = 0; h < cfg.heads; ++h) {
      std::string hp = lp + "h" + std::to_string(h) + ".";
      Tape::Id q = tape.matmul(x, p.at(hp + "wq"));
      Tape::Id k = tape.matmul(x, p.at(hp + "wk"));
      Tape::Id v = tape.matmul(x, p.at(hp + "wv"));
      Tape::Id scores = tape.scale(tape.matmul(q, k, false, true), inv_sqrt_dh);
      Tape::Id a = tape.softmax_rows(scores);
      if (trace) trace->attn[l].push_back(tape.val(a));
      head_outs.push_back(tape.matmul(a, v));
    }
    Tape::Id merged = head_outs[0];
    for (size_t h = 1; h < head_outs.size(); ++h) merged = tape.concat_cols(merged, head_outs[h]);
    Tape::Id attn_out = affine(tape, p, merged, lp + "wo", lp + "bo");
    Tape::Id x1 = layer_norm_affine(tape, p, tape.add(x, attn_out), lp + "ln1_g", lp + "ln1_b",
                                    cfg.ln_eps);
    Tape::Id ff = affine(tape, p, tape.gelu(affine(tape, p, x1, lp + "ffn_w1", lp + "ffn_b1")),
                         lp + "ffn_w2", lp + "ffn_b2");
    x = layer_norm_affine(tape, p, tape.add(x1, ff), lp + "ln2_g", lp + "ln2_b", cfg.ln_eps);
  }
  return x;
}

}  // namespace kgalign
