#include "kgalign/optim.hpp"

namespace kgalign {

Tensor& ParamGroup::at(const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw std::out_of_range("param group: no parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamGroup::at(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) throw std::out_of_range("param group: no parameter '" + name + "'");
  return it->second;
}

void ParamGroup::add(const std::string& name, Tensor t) {
  if (has(name)) throw std::invalid_argument("param group: duplicate parameter '" + name + "'");
  params.emplace(name, std::move(t));
}

void adam_step(ParamGroup& group, const std::map<std::string, Tensor>& grads,
               const AdamConfig& cfg) {
  for (const auto& [name, g] : grads) {
    Tensor& p = group.at(name);
    if (!p.same_shape(g))
      throw std::invalid_argument("adam_step: gradient shape " + g.shape_str() +
                                  " does not match parameter '" + name + "' " + p.shape_str());
    AdamState& st = group.state[name];
    if (st.m.size() == 0) {
      st.m = Tensor::zeros(p.rows, p.cols);
      st.v = Tensor::zeros(p.rows, p.cols);
    }
    st.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
    for (int i = 0; i < p.size(); ++i) {
      st.m.data[i] = cfg.beta1 * st.m.data[i] + (1.0 - cfg.beta1) * g.data[i];
      st.v.data[i] = cfg.beta2 * st.v.data[i] + (1.0 - cfg.beta2) * g.data[i] * g.data[i];
      const double mhat = st.m.data[i] / bc1;
      const double vhat = st.v.data[i] / bc2;
      p.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace kgalign
