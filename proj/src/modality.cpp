#include "kgalign/modality.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kgalign/kg_encoder.hpp"

namespace kgalign {

namespace {

std::vector<double> parse_csv_row(const std::string& line, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      out.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw std::runtime_error(where + ": bad number '" + field + "'");
    }
  }
  return out;
}

}  // namespace

ImageFeatures load_image_features(const std::string& path, const std::string& sample_id) {
  const std::string who = "image features for sample '" + sample_id + "' (" + path + ")";
  std::ifstream is(path);
  if (!is) throw std::runtime_error(who + ": cannot open");
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(who + ": missing header");

  ImageFeatures f;
  int d_c = -1, d_o = -1;
  {
    std::stringstream ss(line);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::runtime_error(who + ": malformed header");
      std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "d_c") d_c = std::stoi(val);
      else if (key == "d_o") d_o = std::stoi(val);
      else if (key == "conf") f.conf = std::stod(val);
      else if (key == "iou") f.iou = std::stod(val);
      else throw std::runtime_error(who + ": unknown header field '" + key + "'");
    }
  }
  if (d_c < 1 || d_o < 1) throw std::runtime_error(who + ": header must set d_c and d_o");

  if (!std::getline(is, line)) throw std::runtime_error(who + ": missing global feature row");
  auto cls = parse_csv_row(line, who);
  if (static_cast<int>(cls.size()) != d_c)
    throw std::runtime_error(who + ": global row has " + std::to_string(cls.size()) +
                             " values, header says d_c=" + std::to_string(d_c));
  f.clip_cls = Tensor(1, d_c, std::move(cls));

  std::vector<double> obj_data;
  int k = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto row = parse_csv_row(line, who);
    if (static_cast<int>(row.size()) != d_o)
      throw std::runtime_error(who + ": object row " + std::to_string(k + 1) + " has " +
                               std::to_string(row.size()) + " values, header says d_o=" +
                               std::to_string(d_o));
    ++k;
    if (k > kMaxObjectRegions)
      throw std::runtime_error(who + ": more than " + std::to_string(kMaxObjectRegions) +
                               " object rows");
    obj_data.insert(obj_data.end(), row.begin(), row.end());
  }
  if (k < 1) throw std::runtime_error(who + ": needs at least one object row");
  f.objects = Tensor(k, d_o, std::move(obj_data));
  if (!f.clip_cls.all_finite() || !f.objects.all_finite())
    throw std::runtime_error(who + ": non-finite feature value");
  return f;
}

void save_image_features(const std::string& path, const ImageFeatures& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("image features: cannot write '" + path + "'");
  os.precision(17);
  os << "d_c=" << f.clip_cls.cols << ",d_o=" << f.objects.cols << ",conf=" << f.conf
     << ",iou=" << f.iou << "\n";
  for (int j = 0; j < f.clip_cls.cols; ++j) os << (j ? "," : "") << f.clip_cls.at(0, j);
  os << "\n";
  for (int i = 0; i < f.objects.rows; ++i) {
    for (int j = 0; j < f.objects.cols; ++j) os << (j ? "," : "") << f.objects.at(i, j);
    os << "\n";
  }
}

void add_image_params(ParamGroup& g, const ImageEncoderConfig& cfg, Rng& rng) {
  cfg.transformer().validate("img_encoder");
  g.add("img.proj.w_clip", matrix_param(cfg.d_c, cfg.dim, rng));
  g.add("img.proj.b_clip", Tensor::zeros(1, cfg.dim));
  g.add("img.proj.w_obj", matrix_param(cfg.d_o, cfg.dim, rng));
  g.add("img.proj.b_obj", Tensor::zeros(1, cfg.dim));
  g.add("img.cls_marker", table_param(1, cfg.dim, rng));
  add_transformer_params(g, "img.enc", cfg.transformer(), rng);
}

Tape::Id project_image(Tape& tape, const ParamIds& p, Tape::Id clip_cls, Tape::Id objects) {
  Tape::Id cls = affine(tape, p, clip_cls, "img.proj.w_clip", "img.proj.b_clip");
  Tape::Id obj = affine(tape, p, objects, "img.proj.w_obj", "img.proj.b_obj");
  return tape.concat_rows({cls, obj});
}

ImageEncodeResult encode_image(Tape& tape, const ParamIds& p, const ImageEncoderConfig& cfg,
                               const ImageFeatures& feats, AttentionTrace* trace) {
  if (feats.clip_cls.cols != cfg.d_c || feats.objects.cols != cfg.d_o)
    throw std::invalid_argument("encode_image: feature dims do not match projection config");
  if (feats.num_objects() < 1 || feats.num_objects() > kMaxObjectRegions)
    throw std::invalid_argument("encode_image: object count out of range");
  Tape::Id seq = project_image(tape, p, tape.input(feats.clip_cls), tape.input(feats.objects));
  if (cfg.cls_slot_marker) {
    // only slot 0 is marked; object slots stay order-free
    Tensor sel(feats.num_objects() + 1, 1);
    sel.at(0, 0) = 1.0;
    seq = tape.add(seq, tape.matmul(tape.input(sel), p.at("img.cls_marker")));
  }
  Tape::Id out = transformer_forward(tape, p, "img.enc", cfg.transformer(), seq, trace);
  return {tape.gather_rows(out, {0}), out};
}

void add_text_params(ParamGroup& g, const TextEncoderConfig& cfg, Rng& rng) {
  cfg.transformer().validate("text_encoder");
  if (cfg.vocab_size < 3) throw std::invalid_argument("text_encoder: vocab too small");
  g.add("text_encoder.tok_emb", table_param(cfg.vocab_size, cfg.dim, rng));
  g.add("text_encoder.pos_emb", table_param(cfg.max_len, cfg.dim, rng));
  add_transformer_params(g, "text_encoder.enc", cfg.transformer(), rng);
}

TextEncodeResult encode_text(Tape& tape, const ParamIds& p, const TextEncoderConfig& cfg,
                             const std::vector<int>& tokens, AttentionTrace* trace) {
  if (tokens.empty()) throw std::invalid_argument("encode_text: empty token sequence");
  std::vector<int> seq = clamp_tokens(tokens, cfg.max_len);
  std::vector<int> positions(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) positions[i] = static_cast<int>(i);
  Tape::Id x = tape.add(tape.gather_rows(p.at("text_encoder.tok_emb"), seq),
                        tape.gather_rows(p.at("text_encoder.pos_emb"), positions));
  Tape::Id out = transformer_forward(tape, p, "text_encoder.enc", cfg.transformer(), x, trace);
  return {tape.gather_rows(out, {0}), out};
}

}  // namespace kgalign
