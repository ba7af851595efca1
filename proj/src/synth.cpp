#include "kgalign/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kgalign/modality.hpp"
#include "kgalign/nli.hpp"
#include "kgalign/rng.hpp"

namespace kgalign {

namespace {

struct RawTriple {
  int h, r, t;
  bool operator<(const RawTriple& o) const {
    if (h != o.h) return h < o.h;
    if (r != o.r) return r < o.r;
    return t < o.t;
  }
};

std::string pad_num(int v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s = "0" + s;
  return s;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_entities < 10) throw std::invalid_argument("synth: need at least 10 entities");
  if (n_relations < 1 || n_samples < 1)
    throw std::invalid_argument("synth: relations and samples must be positive");
  if (claims_min < 1 || claims_max < claims_min)
    throw std::invalid_argument("synth: bad claim count range");
  if (d_c < 1 || d_o < 1) throw std::invalid_argument("synth: feature dims must be positive");
}

SynthOutput synth_generate(const SynthConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::create_directories(fs::path(out_dir) / "features");

  const int ent_width = static_cast<int>(std::to_string(cfg.n_entities - 1).size());
  auto ent_label = [&](int e) { return "ent" + pad_num(e, ent_width); };
  auto rel_label = [&](int r) { return "rel" + std::to_string(r); };

  // --- knowledge graph ---
  Rng kg_rng(cfg.seed, "synth_kg");
  std::set<RawTriple> triple_set;
  std::vector<RawTriple> triples;
  for (int h = 0; h < cfg.n_entities; ++h) {
    for (int k = 0; k < cfg.triples_per_entity; ++k) {
      for (int attempt = 0; attempt < 100; ++attempt) {
        int t = kg_rng.uniform_int(cfg.n_entities - 1);
        if (t >= h) ++t;  // no self-loops in the synthetic world
        RawTriple tr{h, kg_rng.uniform_int(cfg.n_relations), t};
        if (triple_set.insert(tr).second) {
          triples.push_back(tr);
          break;
        }
      }
    }
  }
  std::vector<std::set<int>> adjacent(cfg.n_entities);
  std::vector<std::vector<RawTriple>> incident(cfg.n_entities);
  for (const RawTriple& tr : triples) {
    adjacent[tr.h].insert(tr.t);
    adjacent[tr.t].insert(tr.h);
    incident[tr.h].push_back(tr);
    incident[tr.t].push_back(tr);
  }

  auto verbalize = [&](const RawTriple& tr) {
    return ent_label(tr.h) + " " + rel_label(tr.r) + " " + ent_label(tr.t) + ".";
  };

  // --- descriptions ---
  std::vector<std::string> descriptions(cfg.n_entities);
  for (int e = 0; e < cfg.n_entities; ++e) {
    std::ostringstream os;
    os << ent_label(e) << " is a thing";
    int listed = 0;
    for (const RawTriple& tr : incident[e]) {
      if (tr.h != e) continue;
      os << " . it " << rel_label(tr.r) << " " << ent_label(tr.t);
      if (++listed == 2) break;
    }
    if (listed == 0) os << " with no listed relations";
    os << " .";
    descriptions[e] = os.str();
  }

  // --- samples ---
  Rng sample_rng(cfg.seed, "synth_samples");
  std::vector<int> labels(static_cast<size_t>(cfg.n_samples), 0);
  for (int i = 0; i < cfg.n_samples / 2; ++i) labels[i] = 1;  // exact class balance
  sample_rng.shuffle(labels);

  const int sample_width = static_cast<int>(std::to_string(cfg.n_samples - 1).size());
  TableNliScorer fixture;
  std::ofstream dataset_os(fs::path(out_dir) / "dataset.jsonl");
  if (!dataset_os) throw std::runtime_error("synth: cannot write dataset.jsonl");

  for (int i = 0; i < cfg.n_samples; ++i) {
    const std::string sid = "s" + pad_num(i, sample_width);
    const bool fake = labels[i] == 1;

    std::vector<RawTriple> claims;
    std::vector<bool> corrupted;
    for (int attempt = 0; attempt < 200 && claims.empty(); ++attempt) {
      int c = cfg.claims_min + sample_rng.uniform_int(cfg.claims_max - cfg.claims_min + 1);
      std::set<RawTriple> chosen;
      while (static_cast<int>(chosen.size()) < c)
        chosen.insert(triples[sample_rng.uniform_int(static_cast<int>(triples.size()))]);
      std::vector<RawTriple> cand(chosen.begin(), chosen.end());
      sample_rng.shuffle(cand);

      if (!fake) {
        claims = cand;
        corrupted.assign(claims.size(), false);
        break;
      }
      // corrupt every claim: swap each tail for an entity with no
      // knowledge-graph link to anything the sample mentions, so every fake
      // claim is decidably false
      bool ok = true;
      for (int ci = 0; ci < c && ok; ++ci) {
        std::set<int> others;
        for (int j = 0; j < c; ++j) {
          others.insert(cand[j].h);
          if (j != ci) others.insert(cand[j].t);
        }
        ok = false;
        for (int tries = 0; tries < 300; ++tries) {
          int nt = sample_rng.uniform_int(cfg.n_entities);
          if (nt == cand[ci].h || nt == cand[ci].t || others.count(nt)) continue;
          bool linked = false;
          for (int o : others)
            if (adjacent[nt].count(o)) {
              linked = true;
              break;
            }
          if (linked) continue;
          cand[ci].t = nt;
          ok = true;
          break;
        }
      }
      if (ok) {
        claims = cand;
        corrupted.assign(claims.size(), true);
      }
    }
    if (claims.empty())
      throw std::runtime_error("synth: could not build sample " + sid +
                               " (graph too dense for corruption)");

    std::ostringstream text_os;
    std::vector<std::string> entity_labels;
    std::set<int> extracted;
    auto note_entity = [&](int e) {
      if (extracted.insert(e).second) entity_labels.push_back(ent_label(e));
    };
    for (size_t j = 0; j < claims.size(); ++j) {
      if (j) text_os << " ";
      text_os << verbalize(claims[j]);
      note_entity(claims[j].h);
      note_entity(claims[j].t);
    }
    const std::string text = text_os.str();
    const std::string hash = premise_hash(text);

    // entail every graph triple touching the sample's entities, then pin the
    // claim verdicts (corrupted claims contradict)
    for (int e : extracted)
      for (const RawTriple& tr : incident[e])
        fixture.add(hash, verbalize(tr), NliVerdict{0.9, 0.1, 0.0});
    for (size_t j = 0; j < claims.size(); ++j) {
      if (corrupted[j])
        fixture.add(hash, verbalize(claims[j]), NliVerdict{0.0, 0.1, 0.9});
      else
        fixture.add(hash, verbalize(claims[j]), NliVerdict{0.9, 0.1, 0.0});
    }

    // label-free image features; low amplitude keeps the uninformative image
    // channel from drowning the knowledge signal at desk scale
    Rng img_rng(cfg.seed, "synth_img_" + sid);
    ImageFeatures feats;
    feats.conf = 0.2;
    feats.iou = 0.7;
    feats.clip_cls = Tensor(1, cfg.d_c);
    for (auto& x : feats.clip_cls.data) x = img_rng.uniform(-0.25, 0.25);
    int k = 2 + img_rng.uniform_int(4);
    feats.objects = Tensor(k, cfg.d_o);
    for (auto& x : feats.objects.data) x = img_rng.uniform(-0.25, 0.25);
    const std::string feat_rel = "features/" + sid + ".txt";
    save_image_features((fs::path(out_dir) / feat_rel).string(), feats);

    nlohmann::json j;
    j["id"] = sid;
    j["text"] = text;
    j["entities"] = entity_labels;
    j["image_features"] = feat_rel;
    j["label"] = fake ? "fake" : "real";
    dataset_os << j.dump() << "\n";
  }
  dataset_os.close();

  // --- graph files ---
  SynthOutput out;
  out.triples_path = (fs::path(out_dir) / "kg_triples.tsv").string();
  out.descriptions_path = (fs::path(out_dir) / "kg_descriptions.tsv").string();
  out.vocab_path = (fs::path(out_dir) / "vocab.txt").string();
  out.nli_path = (fs::path(out_dir) / "nli_fixture.tsv").string();
  out.dataset_path = (fs::path(out_dir) / "dataset.jsonl").string();
  out.features_dir = (fs::path(out_dir) / "features").string();

  std::ofstream tri_os(out.triples_path);
  for (const RawTriple& tr : triples)
    tri_os << ent_label(tr.h) << "\t" << rel_label(tr.r) << "\t" << ent_label(tr.t) << "\n";

  std::ofstream desc_os(out.descriptions_path);
  for (int e = 0; e < cfg.n_entities; ++e)
    desc_os << ent_label(e) << "\t" << ent_label(e) << "\t" << descriptions[e] << "\n";

  std::vector<std::string> vocab_tokens = {"<unk>", "<mask>", "<cls>", "is",   "a",
                                           "thing",  "it",     "with",  "no",  "listed",
                                           "relations"};
  for (int e = 0; e < cfg.n_entities; ++e) vocab_tokens.push_back(ent_label(e));
  for (int r = 0; r < cfg.n_relations; ++r) vocab_tokens.push_back(rel_label(r));
  std::ofstream vocab_os(out.vocab_path);
  for (const auto& t : vocab_tokens) vocab_os << t << "\n";

  fixture.save(out.nli_path);
  return out;
}

std::string desk_config_text(const SynthOutput& files) {
  std::ostringstream os;
  os << "# desk-scale preset for the synthetic task\n"
     << "data.vocab = " << files.vocab_path << "\n"
     << "data.triples = " << files.triples_path << "\n"
     << "data.descriptions = " << files.descriptions_path << "\n"
     << "data.nli_fixture = " << files.nli_path << "\n"
     << "nli.scorer = table\n"
     << "\n"
     << "model.dim = 32\n"
     << "model.qk_dim = 16\n"
     << "model.gat_layers = 2\n"
     << "model.kg_layers = 1\n"
     << "model.kg_max_desc_len = 12\n"
     << "model.text_layers = 1\n"
     << "model.text_max_len = 24\n"
     << "model.img_layers = 1\n"
     << "model.fusion_pooled_only = true\n"
     << "\n"
     << "selection.hop_k = 1\n"
     << "selection.top_k = 3\n"
     << "selection.min_shared_seeds = 2\n"
     << "selection.nli_threshold = 0.5\n"
     << "\n"
     << "train.batch_size = 8\n"
     << "train.phase1_epochs = 16\n"
     << "train.phase2_epochs = 4\n"
     << "train.base_lr = 2e-3\n"
     << "train.phase2_lr = 3e-4\n"
     << "train.lr_decay = 0.7\n"
     << "train.lr_decay_period = 5\n"
     << "train.seed = 1\n"
     << "\n"
     << "pretrain.steps = 2000\n"
     << "pretrain.lr = 3e-3\n"
     << "pretrain.seed = 1\n";
  return os.str();
}

}  // namespace kgalign
