#ifndef KGALIGN_MODALITY_HPP
#define KGALIGN_MODALITY_HPP

#include <string>
#include <vector>

#include "kgalign/nn.hpp"

namespace kgalign {

constexpr int kMaxObjectRegions = 36;

// Precomputed per-image features: one global vector plus K object rows.
// The detector thresholds in the header are provenance only.
struct ImageFeatures {
  Tensor clip_cls;  // 1 x d_c
  Tensor objects;   // K x d_o, 1 <= K <= 36
  double conf = 0.0;
  double iou = 0.0;

  int num_objects() const { return objects.rows; }
};

// header "d_c=<int>,d_o=<int>,conf=<float>,iou=<float>", one csv row for the
// global vector, then K csv rows for objects
ImageFeatures load_image_features(const std::string& path, const std::string& sample_id);
void save_image_features(const std::string& path, const ImageFeatures& f);

struct ImageEncoderConfig {
  int d_c = 8;  // global feature size
  int d_o = 8;  // object feature size
  int dim = 16;
  int layers = 1;
  int heads = 2;
  int ffn_hidden = 32;
  // marks position 0 with a learned vector; object slots carry no positional
  // signal so their storage order cannot change T_img
  bool cls_slot_marker = true;

  TransformerConfig transformer() const { return {dim, layers, heads, ffn_hidden}; }
};

// parameters under "img.": proj.w_clip/proj.b_clip, proj.w_obj/proj.b_obj,
// cls_marker, enc.*
void add_image_params(ParamGroup& g, const ImageEncoderConfig& cfg, Rng& rng);

// rowwise affine projection into model space; row 0 is the projected global
// vector, rows 1..K the projected objects
Tape::Id project_image(Tape& tape, const ParamIds& p, Tape::Id clip_cls, Tape::Id objects);

struct ImageEncodeResult {
  Tape::Id t_img;   // output at position 0
  Tape::Id tokens;  // all K+1 output rows
};

ImageEncodeResult encode_image(Tape& tape, const ParamIds& p, const ImageEncoderConfig& cfg,
                               const ImageFeatures& feats, AttentionTrace* trace = nullptr);

struct TextEncoderConfig {
  int vocab_size = 0;
  int dim = 16;
  int layers = 1;
  int heads = 2;
  int ffn_hidden = 32;
  int max_len = 24;  // CLS included

  TransformerConfig transformer() const { return {dim, layers, heads, ffn_hidden}; }
};

// parameters under "text_encoder.": tok_emb, pos_emb, enc.*
void add_text_params(ParamGroup& g, const TextEncoderConfig& cfg, Rng& rng);

struct TextEncodeResult {
  Tape::Id t_txt;   // CLS output
  Tape::Id tokens;  // all token outputs
};

TextEncodeResult encode_text(Tape& tape, const ParamIds& p, const TextEncoderConfig& cfg,
                             const std::vector<int>& tokens, AttentionTrace* trace = nullptr);

}  // namespace kgalign

#endif
