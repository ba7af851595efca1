#ifndef KGALIGN_TENSOR_HPP
#define KGALIGN_TENSOR_HPP

#include <cassert>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgalign {

// Dense row-major matrix of doubles. Vectors are 1 x d rows, scalars 1 x 1.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {
    if (r < 0 || c < 0) throw std::invalid_argument("tensor: negative shape");
  }
  Tensor(int r, int c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
    if (data.size() != static_cast<size_t>(r) * c)
      throw std::invalid_argument("tensor: data length does not match shape");
  }

  static Tensor zeros(int r, int c) { return Tensor(r, c); }
  static Tensor full(int r, int c, double v) {
    Tensor t(r, c);
    for (auto& x : t.data) x = v;
    return t;
  }
  static Tensor scalar(double v) { return Tensor(1, 1, {v}); }
  static Tensor row(std::vector<double> v) {
    int n = static_cast<int>(v.size());
    return Tensor(1, n, std::move(v));
  }

  int size() const { return rows * cols; }
  std::vector<int> shape() const { return {rows, cols}; }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

  double item() const {
    if (size() != 1) throw std::logic_error("tensor: item() on non-scalar");
    return data[0];
  }

  bool all_finite() const;
  std::string shape_str() const;
};

// C = op(A, ta) * op(B, tb) where op(X, true) = X^T. Plain triple loop.
Tensor matmul_raw(const Tensor& a, const Tensor& b, bool ta = false, bool tb = false);

}  // namespace kgalign

#endif
