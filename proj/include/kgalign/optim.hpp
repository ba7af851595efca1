#ifndef KGALIGN_OPTIM_HPP
#define KGALIGN_OPTIM_HPP

#include <cmath>
#include <map>
#include <string>

#include "kgalign/tensor.hpp"

namespace kgalign {

struct AdamState {
  Tensor m;  // first moment
  Tensor v;  // second moment
  long step = 0;
};

// Named trainable tensors plus per-parameter Adam state. std::map keeps
// iteration order stable so training is reproducible.
struct ParamGroup {
  std::map<std::string, Tensor> params;
  std::map<std::string, AdamState> state;

  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  void add(const std::string& name, Tensor t);
  bool has(const std::string& name) const { return params.count(name) > 0; }
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard Adam with bias correction. Updates exactly the parameters named in
// grads; everything else (values, moments, step counts) is left untouched.
void adam_step(ParamGroup& group, const std::map<std::string, Tensor>& grads,
               const AdamConfig& cfg);

inline double lr_schedule(double base_lr, int epoch, double decay = 0.1, int period = 3) {
  if (epoch < 0) throw std::invalid_argument("lr_schedule: negative epoch");
  return base_lr * std::pow(decay, static_cast<double>(epoch / period));
}

}  // namespace kgalign

#endif
