#ifndef KGALIGN_NLI_HPP
#define KGALIGN_NLI_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace kgalign {

// raised when a scorer fails while filtering; the pipeline skips the sample
struct NliScorerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NliVerdict {
  double entail = 0.0;
  double neutral = 1.0;
  double contradict = 0.0;

  double max_signal() const { return entail > contradict ? entail : contradict; }
};

// Entail/neutral/contradict judgment for (news text, verbalized triple) pairs.
// Implementations must be deterministic for identical inputs.
class NliScorer {
 public:
  virtual ~NliScorer() = default;
  virtual NliVerdict score(const std::string& premise, const std::string& hypothesis) const = 0;
};

// Exact verdicts from a fixture file keyed by (fnv1a64 hex of premise,
// hypothesis). Unlisted pairs fall back to neutral.
class TableNliScorer : public NliScorer {
 public:
  static TableNliScorer load(const std::string& path);

  NliVerdict score(const std::string& premise, const std::string& hypothesis) const override;

  void add(const std::string& premise_hash, const std::string& hypothesis, NliVerdict v);
  void save(const std::string& path) const;
  size_t size() const { return table_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, NliVerdict> table_;
};

// Heuristic scorer for synthetic experiments: entailment is the Jaccard
// overlap of content tokens between hypothesis and premise; the overlap mass
// moves to contradiction when the premise carries a negation marker.
class LexicalNliScorer : public NliScorer {
 public:
  NliVerdict score(const std::string& premise, const std::string& hypothesis) const override;
};

std::string premise_hash(const std::string& premise);

}  // namespace kgalign

#endif
