#ifndef KGALIGN_CONFIG_HPP
#define KGALIGN_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "kgalign/kg_encoder.hpp"
#include "kgalign/pipeline.hpp"

namespace kgalign {

// Flat key = value file; '#' starts a comment. Any key can be overridden on
// the command line with --key=value.
class Config {
 public:
  Config() = default;
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void apply_override(const std::string& kv);  // "key=value"

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& def = "") const;
  int get_int(const std::string& key, int def) const;
  double get_double(const std::string& key, double def) const;
  bool get_bool(const std::string& key, bool def) const;
  uint64_t get_u64(const std::string& key, uint64_t def) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

ModelConfig model_config_from(const Config& c);
TrainConfig train_config_from(const Config& c);
PretrainConfig pretrain_config_from(const Config& c);

}  // namespace kgalign

#endif
