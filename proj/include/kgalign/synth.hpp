#ifndef KGALIGN_SYNTH_HPP
#define KGALIGN_SYNTH_HPP

#include <cstdint>
#include <string>

namespace kgalign {

// Deterministic synthetic world for end-to-end checks. Samples verbalize a
// few knowledge-graph triples; a sample is fake iff one claim's tail was
// swapped for an entity with no link to the sample's entities, so veracity is
// decidable from the graph alone. The NLI fixture entails true triples and
// contradicts corrupted claims.
struct SynthConfig {
  uint64_t seed = 7;
  int n_entities = 50;
  int n_relations = 8;
  int n_samples = 500;
  int d_c = 8;  // synthetic global image feature size
  int d_o = 8;  // synthetic object feature size
  int triples_per_entity = 3;
  int claims_min = 2;
  int claims_max = 3;

  void validate() const;
};

struct SynthOutput {
  std::string triples_path;
  std::string descriptions_path;
  std::string vocab_path;
  std::string nli_path;
  std::string dataset_path;
  std::string features_dir;
};

SynthOutput synth_generate(const SynthConfig& cfg, const std::string& out_dir);

// desk-scale preset (model + training hyperparameters) wired to the
// generated files; the synth command writes it next to them
std::string desk_config_text(const SynthOutput& files);

}  // namespace kgalign

#endif
