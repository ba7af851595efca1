#include "kgalign/dataset.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace kgalign {

std::vector<Sample> load_dataset(const std::string& path, const KnowledgeGraph& g,
                                 const Vocab& vocab, std::vector<std::string>* warnings) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_dataset: cannot open '" + path + "'");
  std::vector<Sample> samples;
  std::string line;
  int line_no = 0;
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("load_dataset: " + path + ":" + std::to_string(line_no) +
                               ": malformed JSON: " + e.what());
    }
    Sample s;
    try {
      s.id = j.at("id").get<std::string>();
      s.text = j.at("text").get<std::string>();
      s.entity_labels = j.at("entities").get<std::vector<std::string>>();
      s.image_features = j.at("image_features").get<std::string>();
      std::string label = j.at("label").get<std::string>();
      if (label == "real") s.label = kLabelReal;
      else if (label == "fake") s.label = kLabelFake;
      else throw std::runtime_error("label must be \"real\" or \"fake\"");
    } catch (const std::exception& e) {
      throw std::runtime_error("load_dataset: " + path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
    if (s.entity_labels.empty()) {
      warn("sample '" + s.id + "' dropped: no extractable entities");
      continue;
    }
    bool resolvable = true;
    for (const auto& label : s.entity_labels) {
      EntityId e = g.entity_id(label);
      if (e < 0) {
        warn("sample '" + s.id + "' dropped: entity '" + label + "' not in the knowledge graph");
        resolvable = false;
        break;
      }
      s.entities.push_back(e);
    }
    if (!resolvable) continue;
    s.tokens = vocab.tokenize(s.text);
    if (s.tokens.empty()) {
      warn("sample '" + s.id + "' dropped: text has no tokens");
      continue;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

void save_dataset(const std::string& path, const std::vector<Sample>& samples,
                  const KnowledgeGraph& g) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_dataset: cannot write '" + path + "'");
  for (const Sample& s : samples) {
    nlohmann::json j;
    j["id"] = s.id;
    j["text"] = s.text;
    j["entities"] = s.entity_labels;
    j["image_features"] = s.image_features;
    j["label"] = s.label == kLabelFake ? "fake" : "real";
    os << j.dump() << "\n";
  }
  (void)g;
}

}  // namespace kgalign
