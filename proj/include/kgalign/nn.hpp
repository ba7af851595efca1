#ifndef KGALIGN_NN_HPP
#define KGALIGN_NN_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kgalign/optim.hpp"
#include "kgalign/rng.hpp"
#include "kgalign/tape.hpp"

namespace kgalign {

using ParamIds = std::map<std::string, Tape::Id>;

// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); biases are zeros, LN gains ones
Tensor matrix_param(int in_dim, int out_dim, Rng& rng);
// embedding-style tables draw from uniform(-1/sqrt(d), 1/sqrt(d))
Tensor table_param(int rows, int d, Rng& rng);

// registers every tensor of the group as a tape input
ParamIds register_params(Tape& tape, const ParamGroup& group);

// reads gradients back out after backward(); keep(name) == false skips a name
std::map<std::string, Tensor> collect_grads(
    const Tape& tape, const ParamIds& ids,
    const std::function<bool(const std::string&)>& keep = nullptr);

Tape::Id affine(Tape& tape, const ParamIds& p, Tape::Id x, const std::string& w,
                const std::string& b);
Tape::Id layer_norm_affine(Tape& tape, const ParamIds& p, Tape::Id x, const std::string& gain,
                           const std::string& bias, double eps = 1e-8);

struct TransformerConfig {
  int dim = 16;
  int layers = 1;
  int heads = 2;
  int ffn_hidden = 32;
  double ln_eps = 1e-8;

  void validate(const std::string& who) const;
};

// post-norm encoder stack: per layer, multi-head self-attention with output
// projection, residual + LN, then a GELU feed-forward, residual + LN
void add_transformer_params(ParamGroup& g, const std::string& prefix,
                            const TransformerConfig& cfg, Rng& rng);

// captured row-softmax matrices, [layer][head], each n x n
struct AttentionTrace {
  std::vector<std::vector<Tensor>> attn;
};

Tape::Id transformer_forward(Tape& tape, const ParamIds& p, const std::string& prefix,
                             const TransformerConfig& cfg, Tape::Id x,
                             AttentionTrace* trace = nullptr);

}  // namespace kgalign

#endif
