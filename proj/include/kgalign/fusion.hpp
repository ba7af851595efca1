#ifndef KGALIGN_FUSION_HPP
#define KGALIGN_FUSION_HPP

#include "kgalign/nn.hpp"

namespace kgalign {

// Sequential cross-modal attention: the text vector attends over the
// knowledge context, then the enriched text attends over the image context.
// Each stage is single-query scaled dot-product attention with an output
// projection, residual add and layer norm. Context choice (all node/token
// rows vs the pooled vectors only) is the caller's.
//
// Parameters under "fusion.s1." / "fusion.s2." (wq, wk, wv, wo, ln_g, ln_b)
// and the classifier under "classifier." (w: d x 2, b: 1 x 2)
void add_fusion_params(ParamGroup& g, int dim, Rng& rng);

struct CrossAttendResult {
  Tape::Id out;               // 1 x d
  std::vector<double> alpha;  // attention over context rows
};

CrossAttendResult cross_attend(Tape& tape, const ParamIds& p, const std::string& stage,
                               Tape::Id query, Tape::Id context);

struct FuseResult {
  Tape::Id t_fused;
  std::vector<double> stage1_alpha;
  std::vector<double> stage2_alpha;
};

FuseResult fuse(Tape& tape, const ParamIds& p, Tape::Id t_txt, Tape::Id kg_context,
                Tape::Id img_context);

Tape::Id classify_logits(Tape& tape, const ParamIds& p, Tape::Id t_fused);  // 1 x 2

// class probabilities (p_real, p_fake)
Tape::Id classify(Tape& tape, const ParamIds& p, Tape::Id t_fused);

// -ln p_label from logits; label 0 = real, 1 = fake
Tape::Id ce_loss(Tape& tape, Tape::Id logits, int label);

}  // namespace kgalign

#endif
