#include <doctest.h>

#include <cmath>

#include "kgalign/grad_check.hpp"
#include "kgalign/modality.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace kgalign;
using testutil::TempDir;
using testutil::write_file;

namespace {

ImageEncoderConfig img_config() {
  ImageEncoderConfig cfg;
  cfg.d_c = 4;
  cfg.d_o = 4;
  cfg.dim = 8;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.ffn_hidden = 16;
  return cfg;
}

TextEncoderConfig text_config(int vocab) {
  TextEncoderConfig cfg;
  cfg.vocab_size = vocab;
  cfg.dim = 8;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.ffn_hidden = 16;
  cfg.max_len = 10;
  return cfg;
}

ImageFeatures random_feats(int k, int d_c, int d_o, uint64_t seed) {
  Rng rng(seed, "feats");
  ImageFeatures f;
  f.clip_cls = Tensor(1, d_c);
  for (auto& x : f.clip_cls.data) x = rng.uniform(-1, 1);
  f.objects = Tensor(k, d_o);
  for (auto& x : f.objects.data) x = rng.uniform(-1, 1);
  f.conf = 0.2;
  f.iou = 0.7;
  return f;
}

}  // namespace

TEST_SUITE_BEGIN("modality");

TEST_CASE("identity projection passes features through") {
  ImageEncoderConfig cfg = img_config();
  cfg.dim = 4;  // match feature dims so identity is expressible
  Rng rng(1, "img");
  ParamGroup g;
  add_image_params(g, cfg, rng);
  Tensor eye(4, 4);
  for (int i = 0; i < 4; ++i) eye.at(i, i) = 1.0;
  g.at("img.proj.w_clip") = eye;
  g.at("img.proj.w_obj") = eye;

  ImageFeatures f = random_feats(3, 4, 4, 2);
  Tape tape;
  ParamIds ids = register_params(tape, g);
  const Tensor& out =
      tape.val(project_image(tape, ids, tape.input(f.clip_cls), tape.input(f.objects)));
  REQUIRE(out.rows == 4);
  for (int j = 0; j < 4; ++j) CHECK(out.at(0, j) == doctest::Approx(f.clip_cls.at(0, j)));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) CHECK(out.at(i + 1, j) == doctest::Approx(f.objects.at(i, j)));
}

TEST_CASE("zero features expose the bias row") {
  ImageEncoderConfig cfg = img_config();
  Rng rng(3, "img");
  ParamGroup g;
  add_image_params(g, cfg, rng);
  g.at("img.proj.b_clip") = Tensor::full(1, cfg.dim, 0.25);

  ImageFeatures f;
  f.clip_cls = Tensor::zeros(1, cfg.d_c);
  f.objects = Tensor::zeros(2, cfg.d_o);
  Tape tape;
  ParamIds ids = register_params(tape, g);
  const Tensor& out =
      tape.val(project_image(tape, ids, tape.input(f.clip_cls), tape.input(f.objects)));
  for (int j = 0; j < cfg.dim; ++j) CHECK(out.at(0, j) == doctest::Approx(0.25));
}

TEST_CASE("projection rows equal an independent matrix-vector product") {
  ImageEncoderConfig cfg = img_config();
  Rng rng(5, "img");
  ParamGroup g;
  add_image_params(g, cfg, rng);
  ImageFeatures f = random_feats(4, cfg.d_c, cfg.d_o, 6);
  Tape tape;
  ParamIds ids = register_params(tape, g);
  const Tensor& out =
      tape.val(project_image(tape, ids, tape.input(f.clip_cls), tape.input(f.objects)));
  auto cls = oracles::affine_vec(f.clip_cls.data, g.at("img.proj.w_clip"), g.at("img.proj.b_clip"));
  for (int j = 0; j < cfg.dim; ++j) CHECK(out.at(0, j) == doctest::Approx(cls[j]).epsilon(1e-12));
  for (int i = 0; i < 4; ++i) {
    std::vector<double> row(f.objects.data.begin() + i * cfg.d_o,
                            f.objects.data.begin() + (i + 1) * cfg.d_o);
    auto obj = oracles::affine_vec(row, g.at("img.proj.w_obj"), g.at("img.proj.b_obj"));
    for (int j = 0; j < cfg.dim; ++j)
      CHECK(out.at(i + 1, j) == doctest::Approx(obj[j]).epsilon(1e-12));
  }
}

TEST_CASE("projection is exactly affine under interpolation") {
  ImageEncoderConfig cfg = img_config();
  Rng rng(7, "img");
  ParamGroup g;
  add_image_params(g, cfg, rng);
  ImageFeatures a = random_feats(3, cfg.d_c, cfg.d_o, 8);
  ImageFeatures b = random_feats(3, cfg.d_c, cfg.d_o, 9);
  double alpha = 0.3;
  ImageFeatures mix = a;
  for (int i = 0; i < mix.clip_cls.size(); ++i)
    mix.clip_cls.data[i] = alpha * a.clip_cls.data[i] + (1 - alpha) * b.clip_cls.data[i];
  for (int i = 0; i < mix.objects.size(); ++i)
    mix.objects.data[i] = alpha * a.objects.data[i] + (1 - alpha) * b.objects.data[i];

  auto project = [&](const ImageFeatures& f) {
    Tape tape;
    ParamIds ids = register_params(tape, g);
    return tape.val(project_image(tape, ids, tape.input(f.clip_cls), tape.input(f.objects)));
  };
  Tensor pa = project(a), pb = project(b), pm = project(mix);
  for (int i = 0; i < pm.size(); ++i)
    CHECK(std::fabs(pm.data[i] - (alpha * pa.data[i] + (1 - alpha) * pb.data[i])) < 1e-9);
}

TEST_CASE("cls marker breaks slot symmetry exactly when enabled") {
  ImageEncoderConfig cfg = img_config();
  Rng rng(11, "img");
  ParamGroup g;
  add_image_params(g, cfg, rng);
  // same vector in both slots and identical projections
  g.at("img.proj.w_obj") = g.at("img.proj.w_clip");
  g.at("img.proj.b_obj") = g.at("img.proj.b_clip");
  ImageFeatures f;
  f.clip_cls = Tensor::full(1, cfg.d_c, 0.4);
  f.objects = Tensor::full(1, cfg.d_o, 0.4);  // K = 1, identical token

  auto outputs = [&](bool marker) {
    ImageEncoderConfig c = cfg;
    c.cls_slot_marker = marker;
    Tape tape;
    ParamIds ids = register_params(tape, g);
    ImageEncodeResult r = encode_image(tape, ids, c, f);
    return tape.val(r.tokens);
  };
  Tensor with_marker = outputs(true);
  double diff = 0;
  for (int j = 0; j < cfg.dim; ++j)
    diff += std::fabs(with_marker.at(0, j) - with_marker.at(1, j));
  CHECK(diff > 1e-9);

  Tensor without = outputs(false);
  for (int j = 0; j < cfg.dim; ++j)
    CHECK(without.at(0, j) == doctest::Approx(without.at(1, j)).epsilon(1e-12));
}

TEST_CASE("object row order does not change T_img under the default config") {
  ImageEncoderConfig cfg = img_config();
  Rng rng(13, "img");
  ParamGroup g;
  add_image_params(g, cfg, rng);
  ImageFeatures f = random_feats(4, cfg.d_c, cfg.d_o, 14);
  ImageFeatures swapped = f;
  for (int j = 0; j < cfg.d_o; ++j) {
    std::swap(swapped.objects.at(0, j), swapped.objects.at(3, j));
    std::swap(swapped.objects.at(1, j), swapped.objects.at(2, j));
  }
  auto t_img = [&](const ImageFeatures& feats) {
    Tape tape;
    ParamIds ids = register_params(tape, g);
    return tape.val(encode_image(tape, ids, cfg, feats).t_img);
  };
  Tensor a = t_img(f), b = t_img(swapped);
  CHECK(a.cols == cfg.dim);
  for (int j = 0; j < cfg.dim; ++j) CHECK(std::fabs(a.data[j] - b.data[j]) < 1e-9);
}

TEST_CASE("encoder attention rows sum to one under instrumentation") {
  ImageEncoderConfig cfg = img_config();
  Rng rng(15, "img");
  ParamGroup g;
  add_image_params(g, cfg, rng);
  ImageFeatures f = random_feats(5, cfg.d_c, cfg.d_o, 16);
  Tape tape;
  ParamIds ids = register_params(tape, g);
  AttentionTrace trace;
  encode_image(tape, ids, cfg, f, &trace);
  REQUIRE(trace.attn.size() == static_cast<size_t>(cfg.layers));
  for (const auto& layer : trace.attn) {
    REQUIRE(layer.size() == static_cast<size_t>(cfg.heads));
    for (const Tensor& a : layer) {
      REQUIRE(a.rows == 6);
      for (int i = 0; i < a.rows; ++i) {
        double sum = 0;
        for (int j = 0; j < a.cols; ++j) sum += a.at(i, j);
        CHECK(std::fabs(sum - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("image feature files round-trip and reject malformed input") {
  TempDir dir("img_io");
  ImageFeatures f = random_feats(3, 4, 4, 17);
  save_image_features(dir.file("f.txt"), f);
  ImageFeatures back = load_image_features(dir.file("f.txt"), "s1");
  CHECK(back.num_objects() == 3);
  CHECK(back.conf == doctest::Approx(0.2));
  CHECK(back.iou == doctest::Approx(0.7));
  for (int i = 0; i < f.clip_cls.size(); ++i)
    CHECK(back.clip_cls.data[i] == doctest::Approx(f.clip_cls.data[i]).epsilon(1e-15));
  for (int i = 0; i < f.objects.size(); ++i)
    CHECK(back.objects.data[i] == doctest::Approx(f.objects.data[i]).epsilon(1e-15));

  // header says 3 columns, row has 4
  write_file(dir.file("bad.txt"), "d_c=3,d_o=3,conf=0,iou=0\n1,2,3,4\n1,2,3\n");
  CHECK_THROWS_WITH_AS(load_image_features(dir.file("bad.txt"), "s2"),
                       doctest::Contains("s2"), std::runtime_error);

  // more than 36 object rows
  std::string too_many = "d_c=2,d_o=2,conf=0,iou=0\n0,0\n";
  for (int i = 0; i < 37; ++i) too_many += "1,1\n";
  write_file(dir.file("many.txt"), too_many);
  CHECK_THROWS_WITH_AS(load_image_features(dir.file("many.txt"), "s3"),
                       doctest::Contains("36"), std::runtime_error);

  CHECK_THROWS_AS(load_image_features(dir.file("absent.txt"), "s4"), std::runtime_error);
}

TEST_CASE("encode_text is deterministic, the right shape, and token-sensitive") {
  Vocab v = Vocab::from_tokens({"<unk>", "<mask>", "<cls>", "news", "about", "things"});
  TextEncoderConfig cfg = text_config(v.size());
  Rng rng(19, "text");
  ParamGroup g;
  add_text_params(g, cfg, rng);

  auto encode = [&](const std::string& s) {
    Tape tape;
    ParamIds ids = register_params(tape, g);
    return tape.val(encode_text(tape, ids, cfg, v.tokenize(s)).t_txt);
  };
  Tensor a = encode("news about things");
  Tensor b = encode("news about things");
  CHECK(a.cols == cfg.dim);
  CHECK(a.data == b.data);

  Tensor masked = encode("news about news");
  double diff = 0;
  for (int j = 0; j < cfg.dim; ++j) diff += std::fabs(a.data[j] - masked.data[j]);
  CHECK(diff > 1e-9);

  Tape tape;
  ParamIds ids = register_params(tape, g);
  CHECK_THROWS_AS(encode_text(tape, ids, cfg, {}), std::invalid_argument);
}

TEST_CASE("text and image encoders pass grad check at d=8, 2 layers") {
  Vocab v = Vocab::from_tokens({"<unk>", "<mask>", "<cls>", "w1", "w2", "w3"});
  TextEncoderConfig tcfg = text_config(v.size());
  ImageEncoderConfig icfg = img_config();
  Rng rng(23, "both");
  ParamGroup g;
  add_text_params(g, tcfg, rng);
  add_image_params(g, icfg, rng);
  ImageFeatures feats = random_feats(2, icfg.d_c, icfg.d_o, 24);
  std::vector<int> tokens = v.tokenize("w1 w2 w3 w1");

  Tensor head(8, 1);
  Rng head_rng(25, "head");
  for (auto& x : head.data) x = head_rng.uniform(-1, 1);
  std::map<std::string, Tensor> inputs = g.params;
  inputs["head"] = head;

  auto text_builder = [&](Tape& tape, const std::map<std::string, Tape::Id>& ids) {
    TextEncodeResult r = encode_text(tape, ids, tcfg, tokens);
    return tape.sum_all(tape.matmul(r.t_txt, ids.at("head")));
  };
  CHECK(grad_check_params(text_builder, inputs, 1e-5) < 1e-4);

  auto img_builder = [&](Tape& tape, const std::map<std::string, Tape::Id>& ids) {
    ImageEncodeResult r = encode_image(tape, ids, icfg, feats);
    return tape.sum_all(tape.matmul(r.t_img, ids.at("head")));
  };
  CHECK(grad_check_params(img_builder, inputs, 1e-5) < 1e-4);
}

TEST_SUITE_END();
