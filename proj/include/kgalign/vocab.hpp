#ifndef KGALIGN_VOCAB_HPP
#define KGALIGN_VOCAB_HPP

#include <string>
#include <unordered_map>
#include <vector>

namespace kgalign {

// Fixed word-level vocabulary. Line number = token id; ids 0/1/2 are the
// reserved UNK/MASK/CLS tokens and must be the first three lines of the file.
class Vocab {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kMask = 1;
  static constexpr int kCls = 2;

  static Vocab load(const std::string& path);
  static Vocab from_tokens(const std::vector<std::string>& tokens);  // reserved rows included

  int id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
  }
  const std::string& token(int id) const { return tokens_.at(static_cast<size_t>(id)); }
  int size() const { return static_cast<int>(tokens_.size()); }

  // lowercase, whitespace split, leading/trailing punctuation stripped,
  // out-of-vocab mapped to UNK
  std::vector<int> tokenize(const std::string& text) const;

  void save(const std::string& path) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// shared token normalization (also used by the lexical NLI scorer)
std::vector<std::string> split_normalized(const std::string& text);

}  // namespace kgalign

#endif
