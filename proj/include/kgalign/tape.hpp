#ifndef KGALIGN_TAPE_HPP
#define KGALIGN_TAPE_HPP

#include <deque>
#include <functional>
#include <vector>

#include "kgalign/tensor.hpp"

namespace kgalign {

// Reverse-mode autodiff over Tensor ops. Values are computed eagerly when an
// op is recorded; backward() runs the tape once in reverse. Single-threaded,
// fixed evaluation order, so identical inputs give bitwise-identical results.
class Tape {
 public:
  using Id = int;

  Id input(Tensor t);

  const Tensor& val(Id id) const { return nodes_[id].value; }
  const Tensor& grad(Id id) const { return nodes_[id].grad; }

  // elementwise; shapes must match, or one side broadcasts (1x1 anywhere,
  // or a 1xC row against an NxC matrix)
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id mul(Id a, Id b);

  Id scale(Id a, double s);
  Id add_scalar(Id a, double s);

  Id matmul(Id a, Id b, bool ta = false, bool tb = false);

  Id relu(Id a);
  Id hinge(Id a);  // max(0, x); same map as relu, kept as its own op
  Id gelu(Id a);   // tanh approximation

  Id softmax_rows(Id a);
  Id layer_norm_rows(Id a, double eps = 1e-8);  // normalize only, no affine

  Id gather_rows(Id a, std::vector<int> idx);
  Id concat_cols(Id a, Id b);
  Id concat_rows(const std::vector<Id>& parts);

  Id l2_norm(Id a, double eps = 1e-12);  // sqrt(sum x^2 + eps), 1x1
  Id mean_all(Id a);
  Id sum_all(Id a);

  // per-row -log softmax(logits)[target]; returns Nx1 losses
  Id cross_entropy_logits(Id logits, std::vector<int> targets);

  // seeds d(root)/d(root) = 1 and accumulates gradients into every node
  void backward(Id root);

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&, Id)> back;  // empty for leaves
  };

  Id push(Tensor value, std::function<void(Tape&, Id)> back);
  Tensor& grad_ref(Id id) { return nodes_[id].grad; }

  std::deque<Node> nodes_;  // deque: val() references stay valid as ops are recorded
  bool ran_backward_ = false;
};

}  // namespace kgalign

#endif
