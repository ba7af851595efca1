#ifndef KGALIGN_DATASET_HPP
#define KGALIGN_DATASET_HPP

#include <string>
#include <vector>

#include "kgalign/kg_store.hpp"

namespace kgalign {

constexpr int kLabelReal = 0;
constexpr int kLabelFake = 1;

struct Sample {
  std::string id;
  std::string text;
  std::vector<int> tokens;            // tokenized text, never empty
  std::vector<std::string> entity_labels;
  std::vector<EntityId> entities;     // resolved E_txt, never empty
  std::string image_features;        // path, relative to the dataset file
  int label = kLabelReal;
};

// Line-delimited JSON, one object per line:
//   {"id", "text", "entities": [labels], "image_features": path, "label": "real"|"fake"}
// Samples with unresolvable or missing entities (or empty token sequences)
// are dropped with a warning; malformed JSON is an error naming the line.
std::vector<Sample> load_dataset(const std::string& path, const KnowledgeGraph& g,
                                 const Vocab& vocab,
                                 std::vector<std::string>* warnings = nullptr);

void save_dataset(const std::string& path, const std::vector<Sample>& samples,
                  const KnowledgeGraph& g);

}  // namespace kgalign

#endif
