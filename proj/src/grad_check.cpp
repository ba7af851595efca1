#include "kgalign/grad_check.hpp"

#include <cmath>

namespace kgalign {

namespace {

double eval_scalar(const std::function<Tape::Id(Tape&, Tape::Id)>& f, const Tensor& x) {
  Tape tape;
  Tape::Id in = tape.input(x);
  Tape::Id root = f(tape, in);
  double v = tape.val(root).item();
  if (!std::isfinite(v)) throw std::runtime_error("grad_check: non-finite function value");
  return v;
}

double eval_scalar_multi(
    const std::function<Tape::Id(Tape&, const std::map<std::string, Tape::Id>&)>& f,
    const std::map<std::string, Tensor>& inputs) {
  Tape tape;
  std::map<std::string, Tape::Id> ids;
  for (const auto& [name, t] : inputs) ids[name] = tape.input(t);
  double v = tape.val(f(tape, ids)).item();
  if (!std::isfinite(v)) throw std::runtime_error("grad_check: non-finite function value");
  return v;
}

double relative_error(double analytic, double numeric) {
  return std::fabs(analytic - numeric) / std::max(1.0, std::fabs(numeric));
}

}  // namespace

double grad_check(const std::function<Tape::Id(Tape&, Tape::Id)>& f, const Tensor& x,
                  double eps) {
  Tensor analytic;
  {
    Tape tape;
    Tape::Id in = tape.input(x);
    Tape::Id root = f(tape, in);
    if (!std::isfinite(tape.val(root).item()))
      throw std::runtime_error("grad_check: non-finite function value");
    tape.backward(root);
    analytic = tape.grad(in);
  }
  double worst = 0.0;
  Tensor xp = x;
  for (int i = 0; i < x.size(); ++i) {
    const double orig = xp.data[i];
    xp.data[i] = orig + eps;
    double fp = eval_scalar(f, xp);
    xp.data[i] = orig - eps;
    double fm = eval_scalar(f, xp);
    xp.data[i] = orig;
    const double numeric = (fp - fm) / (2.0 * eps);
    worst = std::max(worst, relative_error(analytic.data[i], numeric));
  }
  return worst;
}

double grad_check_params(
    const std::function<Tape::Id(Tape&, const std::map<std::string, Tape::Id>&)>& f,
    const std::map<std::string, Tensor>& inputs, double eps) {
  std::map<std::string, Tensor> analytic;
  {
    Tape tape;
    std::map<std::string, Tape::Id> ids;
    for (const auto& [name, t] : inputs) ids[name] = tape.input(t);
    Tape::Id root = f(tape, ids);
    if (!std::isfinite(tape.val(root).item()))
      throw std::runtime_error("grad_check: non-finite function value");
    tape.backward(root);
    for (const auto& [name, id] : ids) analytic[name] = tape.grad(id);
  }
  double worst = 0.0;
  std::map<std::string, Tensor> probe = inputs;
  for (auto& [name, t] : probe) {
    for (int i = 0; i < t.size(); ++i) {
      const double orig = t.data[i];
      t.data[i] = orig + eps;
      double fp = eval_scalar_multi(f, probe);
      t.data[i] = orig - eps;
      double fm = eval_scalar_multi(f, probe);
      t.data[i] = orig;
      const double numeric = (fp - fm) / (2.0 * eps);
      worst = std::max(worst, relative_error(analytic[name].data[i], numeric));
    }
  }
  return worst;
}

}  // namespace kgalign
