#include "kgalign/fusion.hpp"

#include <cmath>
#include <stdexcept>

namespace kgalign {

void add_fusion_params(ParamGroup& g, int dim, Rng& rng) {
  for (const char* stage : {"fusion.s1.", "fusion.s2."}) {
    std::string sp(stage);
    g.add(sp + "wq", matrix_param(dim, dim, rng));
    g.add(sp + "wk", matrix_param(dim, dim, rng));
    g.add(sp + "wv", matrix_param(dim, dim, rng));
    g.add(sp + "wo", matrix_param(dim, dim, rng));
    g.add(sp + "ln_g", Tensor::full(1, dim, 1.0));
    g.add(sp + "ln_b", Tensor::zeros(1, dim));
  }
  g.add("classifier.w", matrix_param(dim, 2, rng));
  g.add("classifier.b", Tensor::zeros(1, 2));
}

CrossAttendResult cross_attend(Tape& tape, const ParamIds& p, const std::string& stage,
                               Tape::Id query, Tape::Id context) {
  const Tensor& ctx = tape.val(context);
  if (ctx.rows < 1) throw std::invalid_argument("cross_attend: empty context");
  const int d = tape.val(query).cols;
  if (ctx.cols != d) throw std::invalid_argument("cross_attend: context dim mismatch");

  Tape::Id q = tape.matmul(query, p.at(stage + "wq"));
  Tape::Id k = tape.matmul(context, p.at(stage + "wk"));
  Tape::Id v = tape.matmul(context, p.at(stage + "wv"));
  Tape::Id scores = tape.scale(tape.matmul(q, k, false, true), 1.0 / std::sqrt(double(d)));
  Tape::Id alpha = tape.softmax_rows(scores);
  Tape::Id attended = tape.matmul(tape.matmul(alpha, v), p.at(stage + "wo"));
  Tape::Id out = layer_norm_affine(tape, p, tape.add(query, attended), stage + "ln_g",
                                   stage + "ln_b");
  return {out, tape.val(alpha).data};
}

FuseResult fuse(Tape& tape, const ParamIds& p, Tape::Id t_txt, Tape::Id kg_context,
                Tape::Id img_context) {
  CrossAttendResult s1 = cross_attend(tape, p, "fusion.s1.", t_txt, kg_context);
  CrossAttendResult s2 = cross_attend(tape, p, "fusion.s2.", s1.out, img_context);
  return {s2.out, std::move(s1.alpha), std::move(s2.alpha)};
}

Tape::Id classify_logits(Tape& tape, const ParamIds& p, Tape::Id t_fused) {
  return tape.add(tape.matmul(t_fused, p.at("classifier.w")), p.at("classifier.b"));
}

Tape::Id classify(Tape& tape, const ParamIds& p, Tape::Id t_fused) {
  return tape.softmax_rows(classify_logits(tape, p, t_fused));
}

Tape::Id ce_loss(Tape& tape, Tape::Id logits, int label) {
  if (label != 0 && label != 1) throw std::invalid_argument("ce_loss: label must be 0 or 1");
  return tape.cross_entropy_logits(logits, {label});
}

}  // namespace kgalign
