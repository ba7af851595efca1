#include "kgalign/nli.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "kgalign/rng.hpp"
#include "kgalign/vocab.hpp"

namespace kgalign {

std::string premise_hash(const std::string& premise) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(premise)));
  return std::string(buf);
}

TableNliScorer TableNliScorer::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("nli fixture: cannot open '" + path + "'");
  TableNliScorer scorer;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
      if (c == '\t') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    f.push_back(cur);
    if (f.size() != 5)
      throw std::runtime_error("nli fixture: " + path + ":" + std::to_string(line_no) +
                               ": expected 5 tab-separated fields");
    NliVerdict v;
    v.entail = std::stod(f[2]);
    v.neutral = std::stod(f[3]);
    v.contradict = std::stod(f[4]);
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(v.entail) || !in_unit(v.neutral) || !in_unit(v.contradict) ||
        std::fabs(v.entail + v.neutral + v.contradict - 1.0) > 1e-9)
      throw std::runtime_error("nli fixture: " + path + ":" + std::to_string(line_no) +
                               ": verdict must be three probabilities summing to 1");
    scorer.table_[{f[0], f[1]}] = v;
  }
  return scorer;
}

NliVerdict TableNliScorer::score(const std::string& premise,
                                 const std::string& hypothesis) const {
  auto it = table_.find({premise_hash(premise), hypothesis});
  if (it == table_.end()) return NliVerdict{};  // neutral fallback
  return it->second;
}

void TableNliScorer::add(const std::string& hash, const std::string& hypothesis, NliVerdict v) {
  table_[{hash, hypothesis}] = v;
}

void TableNliScorer::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("nli fixture: cannot write '" + path + "'");
  for (const auto& [key, v] : table_)
    os << key.first << "\t" << key.second << "\t" << v.entail << "\t" << v.neutral << "\t"
       << v.contradict << "\n";
}

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> kStop = {"a",  "an", "the", "is", "was", "are",  "were",
                                              "of", "in", "by",  "to", "and", "with", "that",
                                              "it", "on", "for", "as"};
  return kStop;
}

const std::set<std::string>& negation_markers() {
  static const std::set<std::string> kNeg = {"not",   "no",    "never", "fake",
                                             "hoax",  "false", "didnt", "didn't",
                                             "isnt",  "isn't", "wasnt", "wasn't"};
  return kNeg;
}

}  // namespace

NliVerdict LexicalNliScorer::score(const std::string& premise,
                                   const std::string& hypothesis) const {
  std::set<std::string> p_tokens, h_tokens;
  bool negated = false;
  for (const auto& t : split_normalized(premise)) {
    if (negation_markers().count(t)) negated = true;
    if (!stopwords().count(t)) p_tokens.insert(t);
  }
  for (const auto& t : split_normalized(hypothesis))
    if (!stopwords().count(t)) h_tokens.insert(t);

  size_t inter = 0;
  for (const auto& t : h_tokens) inter += p_tokens.count(t);
  size_t uni = p_tokens.size() + h_tokens.size() - inter;
  double jaccard = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);

  NliVerdict v;
  if (negated) {
    v.contradict = jaccard;
  } else {
    v.entail = jaccard;
  }
  v.neutral = 1.0 - jaccard;
  return v;
}

}  // namespace kgalign
