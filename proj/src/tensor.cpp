#include "kgalign/tensor.hpp"

#include <cmath>
#include <sstream>

namespace kgalign {

bool Tensor::all_finite() const {
  for (double x : data)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

Tensor matmul_raw(const Tensor& a, const Tensor& b, bool ta, bool tb) {
  const int m = ta ? a.cols : a.rows;
  const int k = ta ? a.rows : a.cols;
  const int kb = tb ? b.cols : b.rows;
  const int n = tb ? b.rows : b.cols;
  if (k != kb)
    throw std::invalid_argument("matmul: inner dims mismatch " + a.shape_str() + " vs " +
                                b.shape_str());
  Tensor c(m, n);
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      const double av = ta ? a.at(p, i) : a.at(i, p);
      if (av == 0.0) continue;
      const double* brow = tb ? nullptr : &b.data[static_cast<size_t>(p) * b.cols];
      double* crow = &c.data[static_cast<size_t>(i) * n];
      if (!tb) {
        for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
      } else {
        for (int j = 0; j < n; ++j) crow[j] += av * b.at(j, p);
      }
    }
  }
  return c;
}

}  // namespace kgalign
