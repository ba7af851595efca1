#include "kgalign/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kgalign/checkpoint.hpp"
#include "kgalign/config.hpp"
#include "kgalign/pipeline.hpp"
#include "kgalign/synth.hpp"

namespace kgalign {

namespace {

namespace fs = std::filesystem;

struct World {
  Vocab vocab;
  KnowledgeGraph graph;
  std::unique_ptr<NliScorer> scorer;
};

World load_world(const Config& c) {
  std::string vocab_path = c.get("data.vocab");
  std::string triples_path = c.get("data.triples");
  std::string desc_path = c.get("data.descriptions");
  if (vocab_path.empty() || triples_path.empty() || desc_path.empty())
    throw std::runtime_error("config must set data.vocab, data.triples and data.descriptions");
  World w;
  w.vocab = Vocab::load(vocab_path);
  w.graph = load_graph(triples_path, desc_path, w.vocab);

  std::string scorer_kind = c.get("nli.scorer", c.has("data.nli_fixture") ? "table" : "lexical");
  if (scorer_kind == "table") {
    if (!c.has("data.nli_fixture"))
      throw std::runtime_error("nli.scorer=table requires data.nli_fixture");
    w.scorer = std::make_unique<TableNliScorer>(TableNliScorer::load(c.get("data.nli_fixture")));
  } else if (scorer_kind == "lexical") {
    w.scorer = std::make_unique<LexicalNliScorer>();
  } else {
    throw std::runtime_error("nli.scorer must be table or lexical");
  }
  return w;
}

std::map<std::string, Tensor> load_text_vectors(const Config& c, int dim) {
  std::map<std::string, Tensor> out;
  std::string path = c.get("data.text_vectors");
  if (path.empty())
    throw std::runtime_error("model.text_provider=file requires data.text_vectors");
  std::ifstream is(path);
  if (!is) throw std::runtime_error("text vectors: cannot open '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, field;
    if (!std::getline(ss, id, ','))
      throw std::runtime_error("text vectors: " + path + ":" + std::to_string(line_no));
    std::vector<double> vals;
    while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
    const int n = static_cast<int>(vals.size());
    if (n != dim)
      throw std::runtime_error("text vectors: " + path + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(dim) + " values");
    out.emplace(id, Tensor(1, n, std::move(vals)));
  }
  return out;
}

std::vector<Sample> apply_split(std::vector<Sample> samples, const std::string& ids_path,
                                const std::string& range) {
  if (!ids_path.empty()) {
    std::ifstream is(ids_path);
    if (!is) throw std::runtime_error("ids file: cannot open '" + ids_path + "'");
    std::set<std::string> keep;
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) keep.insert(line);
    }
    std::vector<Sample> out;
    for (auto& s : samples)
      if (keep.count(s.id)) out.push_back(std::move(s));
    return out;
  }
  if (!range.empty()) {
    auto colon = range.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("range must look like start:end, got '" + range + "'");
    size_t a = std::stoul(range.substr(0, colon));
    size_t b = std::stoul(range.substr(colon + 1));
    if (a > b || b > samples.size())
      throw std::runtime_error("range " + range + " out of bounds for " +
                               std::to_string(samples.size()) + " samples");
    return std::vector<Sample>(samples.begin() + a, samples.begin() + b);
  }
  return samples;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<PreparedSample> load_and_prepare(const Config& cfg, const ModelConfig& mc,
                                             const World& w, const std::string& data_path,
                                             const std::string& ids_path,
                                             const std::string& range) {
  std::vector<std::string> warnings;
  auto samples = apply_split(load_dataset(data_path, w.graph, w.vocab, &warnings), ids_path, range);
  std::map<std::string, Tensor> text_vectors;
  const std::map<std::string, Tensor>* tv = nullptr;
  if (mc.text_provider == "file") {
    text_vectors = load_text_vectors(cfg, mc.dim);
    tv = &text_vectors;
  }
  auto prepared = prepare_dataset(w.graph, samples, *w.scorer, mc,
                                  fs::path(data_path).parent_path().string(), &warnings, tv);
  print_warnings(warnings);
  if (prepared.empty()) throw std::runtime_error("no usable samples in '" + data_path + "'");
  return prepared;
}

int cmd_synth(const SynthConfig& sc, const std::string& out_dir) {
  SynthOutput out = synth_generate(sc, out_dir);
  std::string config_path = (fs::path(out_dir) / "desk.config").string();
  std::ofstream os(config_path);
  os << desk_config_text(out);
  std::cout << "wrote " << out.triples_path << "\n"
            << "wrote " << out.descriptions_path << "\n"
            << "wrote " << out.vocab_path << "\n"
            << "wrote " << out.nli_path << "\n"
            << "wrote " << out.dataset_path << "\n"
            << "wrote " << config_path << "\n"
            << "features under " << out.features_dir << "\n";
  return 0;
}

int cmd_pretrain(const Config& cfg, const std::string& out_path, const std::string& log_path) {
  World w = load_world(cfg);
  ModelConfig mc = model_config_from(cfg);
  EncoderConfig ec = mc.kg_encoder;
  ec.vocab_size = w.vocab.size();
  PretrainConfig pc = pretrain_config_from(cfg);
  std::vector<PretrainStepLog> log;
  ParamGroup group = train_encoder(w.graph, ec, pc, &log);
  save_checkpoint(out_path, group.params);
  if (!log_path.empty()) {
    std::ofstream os(log_path);
    if (!os) throw std::runtime_error("cannot write '" + log_path + "'");
    os << "step,loss_mlm,loss_kg,loss_total\n";
    os.precision(12);
    for (const auto& row : log)
      os << row.step << "," << row.loss_mlm << "," << row.loss_kg << "," << row.loss_total
         << "\n";
  }
  if (!log.empty())
    std::cout << "pretrained " << pc.steps << " steps, final loss " << log.back().loss_total
              << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_train(const Config& cfg, const std::string& data_path, const std::string& out_path,
              const std::string& init_path, const std::string& eval_path,
              const std::string& log_path, const std::string& ids_path,
              const std::string& range, const std::string& eval_range, bool f32) {
  World w = load_world(cfg);
  ModelConfig mc = model_config_from(cfg);
  TrainConfig tc = train_config_from(cfg);

  auto train_set = load_and_prepare(cfg, mc, w, data_path, ids_path, range);
  std::vector<PreparedSample> eval_set;
  if (!eval_path.empty()) eval_set = load_and_prepare(cfg, mc, w, eval_path, "", eval_range);

  ParamGroup model = init_model_params(mc, w.vocab.size(), w.graph.num_relations(), tc.seed);
  if (!init_path.empty()) overlay_checkpoint(model, load_checkpoint(init_path));

  auto log = train(model, w.graph, train_set, eval_set, mc, tc);
  save_checkpoint(out_path, model.params, f32);
  if (!log_path.empty()) write_epoch_log(log_path, log);

  const auto& monitor = eval_set.empty() ? train_set : eval_set;
  Metrics m = evaluate(model, w.graph, monitor, mc);
  std::cout << m.to_line() << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_eval(const Config& cfg, const std::string& model_path, const std::string& data_path,
             const std::string& ids_path, const std::string& range,
             const std::string& json_path) {
  World w = load_world(cfg);
  ModelConfig mc = model_config_from(cfg);
  auto samples = load_and_prepare(cfg, mc, w, data_path, ids_path, range);

  ParamGroup model;
  model.params = load_checkpoint(model_path);
  double mean_loss = 0.0;
  Metrics m = evaluate(model, w.graph, samples, mc, &mean_loss);
  std::cout << m.to_line() << "\n";
  if (!json_path.empty()) {
    nlohmann::json j{{"accuracy", m.accuracy}, {"precision", m.precision},
                     {"recall", m.recall},     {"f1", m.f1},
                     {"tp", m.tp},             {"fp", m.fp},
                     {"fn", m.fn},             {"tn", m.tn},
                     {"mean_loss", mean_loss}, {"samples", m.total()}};
    std::ofstream os(json_path);
    os << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_inspect(const Config& cfg, const std::string& model_path, const std::string& data_path,
                const std::string& sample_id, const std::string& out_path) {
  World w = load_world(cfg);
  ModelConfig mc = model_config_from(cfg);
  std::vector<std::string> warnings;
  auto samples = load_dataset(data_path, w.graph, w.vocab, &warnings);
  print_warnings(warnings);
  const Sample* found = nullptr;
  for (const auto& s : samples)
    if (s.id == sample_id) found = &s;
  if (!found) throw std::runtime_error("no sample with id '" + sample_id + "'");

  std::map<std::string, Tensor> text_vectors;
  const std::map<std::string, Tensor>* tv = nullptr;
  if (mc.text_provider == "file") {
    text_vectors = load_text_vectors(cfg, mc.dim);
    tv = &text_vectors;
  }
  PreparedSample ps = prepare_sample(w.graph, *found, *w.scorer, mc,
                                     fs::path(data_path).parent_path().string(), tv);

  ParamGroup model;
  model.params = load_checkpoint(model_path);
  Tape tape;
  ParamIds ids = register_params(tape, model);
  ForwardTrace trace;
  forward_sample(tape, ids, mc, w.graph, ps, &trace);

  nlohmann::json j;
  j["id"] = ps.sample.id;
  j["label"] = ps.sample.label == kLabelFake ? "fake" : "real";
  j["p_real"] = trace.p_real;
  j["p_fake"] = trace.p_fake;
  j["candidates"] = nlohmann::json::array();
  for (const auto& [e, deg] : ps.candidates)
    j["candidates"].push_back(
        {{"id", e}, {"label", w.graph.entities[e].label}, {"degree", deg}});
  j["subgraph"] = nlohmann::json::parse(subgraph_to_json(w.graph, ps.subgraph, ps.nli_scores));
  j["gat_alpha"] = nlohmann::json::array();
  for (const auto& layer : trace.gat_alphas) {
    nlohmann::json jl = nlohmann::json::array();
    for (const auto& node : layer) {
      nlohmann::json jn = nlohmann::json::array();
      for (const auto& entry : node)
        jn.push_back({{"src", entry.src},
                      {"rel", w.graph.relation_label(entry.rel)},
                      {"alpha", entry.alpha}});
      jl.push_back(jn);
    }
    j["gat_alpha"].push_back(jl);
  }
  j["fusion_stage1_alpha"] = trace.fusion_stage1;
  j["fusion_stage2_alpha"] = trace.fusion_stage2;

  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(out_path);
    os << j.dump(2) << "\n";
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

// accepts leftover args of the form --key=value as config overrides
void apply_extras(Config& cfg, std::vector<std::string> extras) {
  for (auto& e : extras) {
    if (e.rfind("--", 0) != 0 || e.find('=') == std::string::npos)
      throw CLI::ParseError("unknown argument '" + e + "' (overrides look like --key=value)", 1);
    cfg.apply_override(e.substr(2));
  }
}

}  // namespace

int run_cli(std::vector<std::string> args) {
  CLI::App app{"knowledge-grounded multimodal fake news detection pipeline"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset and fixtures");
  SynthConfig sc;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", sc.seed, "generator seed");
  synth->add_option("--entities", sc.n_entities, "entity count");
  synth->add_option("--relations", sc.n_relations, "relation count");
  synth->add_option("--samples", sc.n_samples, "sample count");
  synth->add_option("--d-c", sc.d_c, "global image feature size");
  synth->add_option("--d-o", sc.d_o, "object feature size");

  // shared options
  std::string config_path, data_path, out_path, init_path, eval_path, log_path;
  std::string ids_path, range, eval_range, model_path, sample_id, json_path;
  bool f32 = false;
  std::vector<std::string> sets;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key=value config file")->required();
    cmd->add_option("--set", sets, "config override key=value")->take_all();
    cmd->allow_extras();
  };

  auto* pretrain = app.add_subcommand("pretrain-kg", "train the knowledge encoder jointly");
  add_config(pretrain);
  pretrain->add_option("--out", out_path, "checkpoint path")->required();
  pretrain->add_option("--log", log_path, "per-step csv log");

  auto* train_cmd = app.add_subcommand("train", "two-phase supervised training");
  add_config(train_cmd);
  train_cmd->add_option("--data", data_path, "training dataset (jsonl)")->required();
  train_cmd->add_option("--out", out_path, "checkpoint path")->required();
  train_cmd->add_option("--init", init_path, "initialize from checkpoint");
  train_cmd->add_option("--eval", eval_path, "evaluation dataset (jsonl)");
  train_cmd->add_option("--log", log_path, "per-epoch csv log");
  train_cmd->add_option("--ids", ids_path, "keep only sample ids listed in file");
  train_cmd->add_option("--range", range, "keep samples [a:b) by position");
  train_cmd->add_option("--eval-range", eval_range, "range for the eval dataset");
  train_cmd->add_flag("--f32", f32, "store the checkpoint in 32-bit floats");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  add_config(eval_cmd);
  eval_cmd->add_option("--model", model_path, "model checkpoint")->required();
  eval_cmd->add_option("--data", data_path, "dataset (jsonl)")->required();
  eval_cmd->add_option("--ids", ids_path, "keep only sample ids listed in file");
  eval_cmd->add_option("--range", range, "keep samples [a:b) by position");
  eval_cmd->add_option("--json", json_path, "write metrics as json");

  auto* inspect = app.add_subcommand("inspect", "trace one sample end to end");
  add_config(inspect);
  inspect->add_option("--model", model_path, "model checkpoint")->required();
  inspect->add_option("--data", data_path, "dataset (jsonl)")->required();
  inspect->add_option("--sample", sample_id, "sample id")->required();
  inspect->add_option("--out", json_path, "write trace json here instead of stdout");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (synth->parsed()) return cmd_synth(sc, synth_out);

    Config cfg = Config::load(config_path);
    CLI::App* active = app.get_subcommands().front();
    apply_extras(cfg, active->remaining());
    for (const auto& kv : sets) cfg.apply_override(kv);

    if (pretrain->parsed()) return cmd_pretrain(cfg, out_path, log_path);
    if (train_cmd->parsed())
      return cmd_train(cfg, data_path, out_path, init_path, eval_path, log_path, ids_path,
                       range, eval_range, f32);
    if (eval_cmd->parsed())
      return cmd_eval(cfg, model_path, data_path, ids_path, range, json_path);
    if (inspect->parsed()) return cmd_inspect(cfg, model_path, data_path, sample_id, json_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace kgalign
