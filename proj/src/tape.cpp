#include "kgalign/tape.hpp"

#include <algorithm>
#include <cmath>

namespace kgalign {

namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluK = 0.044715;

enum class Bcast { same, row_a, row_b, scalar_a, scalar_b };

Bcast bcast_mode(const Tensor& a, const Tensor& b, const char* op) {
  if (a.same_shape(b)) return Bcast::same;
  if (a.size() == 1) return Bcast::scalar_a;
  if (b.size() == 1) return Bcast::scalar_b;
  if (a.rows == 1 && a.cols == b.cols) return Bcast::row_a;
  if (b.rows == 1 && b.cols == a.cols) return Bcast::row_b;
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + a.shape_str() +
                              " vs " + b.shape_str());
}

}  // namespace

Tape::Id Tape::push(Tensor value, std::function<void(Tape&, Id)> back) {
#ifndef NDEBUG
  if (!value.all_finite()) throw std::logic_error("tape: non-finite value produced");
#endif
  nodes_.push_back(Node{std::move(value), Tensor(), std::move(back)});
  return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::input(Tensor t) { return push(std::move(t), nullptr); }

// dst(grad of x) += g, reducing over broadcast dimensions of x
static void accumulate_bcast(Tensor& dst, const Tensor& g) {
  if (dst.same_shape(g)) {
    for (int i = 0; i < dst.size(); ++i) dst.data[i] += g.data[i];
  } else if (dst.size() == 1) {
    for (double v : g.data) dst.data[0] += v;
  } else {  // dst 1xC, g NxC
    for (int i = 0; i < g.rows; ++i)
      for (int j = 0; j < g.cols; ++j) dst.data[j] += g.at(i, j);
  }
}

Tape::Id Tape::add(Id a, Id b) {
  const Tensor& ta = val(a);
  const Tensor& tb = val(b);
  Bcast mode = bcast_mode(ta, tb, "add");
  Tensor out = (mode == Bcast::row_a || mode == Bcast::scalar_a) ? tb : ta;
  switch (mode) {
    case Bcast::same:
      for (int i = 0; i < out.size(); ++i) out.data[i] += tb.data[i];
      break;
    case Bcast::scalar_a:
      for (auto& x : out.data) x += ta.data[0];
      break;
    case Bcast::scalar_b:
      for (auto& x : out.data) x += tb.data[0];
      break;
    case Bcast::row_a:
      for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out.at(i, j) += ta.at(0, j);
      break;
    case Bcast::row_b:
      for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out.at(i, j) += tb.at(0, j);
      break;
  }
  return push(std::move(out), [a, b](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    accumulate_bcast(t.grad_ref(a), g);
    accumulate_bcast(t.grad_ref(b), g);
  });
}

Tape::Id Tape::sub(Id a, Id b) { return add(a, scale(b, -1.0)); }

// reads o at (i, j) with broadcast semantics
static double bcast_at(const Tensor& o, int i, int j) {
  if (o.size() == 1) return o.data[0];
  if (o.rows == 1) return o.at(0, j);
  return o.at(i, j);
}

Tape::Id Tape::mul(Id a, Id b) {
  const Tensor& ta = val(a);
  const Tensor& tb = val(b);
  Bcast mode = bcast_mode(ta, tb, "mul");
  Tensor out = (mode == Bcast::row_a || mode == Bcast::scalar_a) ? tb : ta;
  const Tensor& small = (mode == Bcast::row_a || mode == Bcast::scalar_a) ? ta : tb;
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out.at(i, j) *= bcast_at(small, i, j);
  return push(std::move(out), [a, b](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    const Tensor& ta = t.val(a);
    const Tensor& tb = t.val(b);
    Tensor ga(g.rows, g.cols), gb(g.rows, g.cols);
    for (int i = 0; i < g.rows; ++i)
      for (int j = 0; j < g.cols; ++j) {
        ga.at(i, j) = g.at(i, j) * bcast_at(tb, i, j);
        gb.at(i, j) = g.at(i, j) * bcast_at(ta, i, j);
      }
    accumulate_bcast(t.grad_ref(a), ga);
    accumulate_bcast(t.grad_ref(b), gb);
  });
}

Tape::Id Tape::scale(Id a, double s) {
  Tensor out = val(a);
  for (auto& x : out.data) x *= s;
  return push(std::move(out), [a, s](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(a);
    for (int i = 0; i < g.size(); ++i) ga.data[i] += s * g.data[i];
  });
}

Tape::Id Tape::add_scalar(Id a, double s) {
  Tensor out = val(a);
  for (auto& x : out.data) x += s;
  return push(std::move(out), [a](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(a);
    for (int i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
  });
}

Tape::Id Tape::matmul(Id a, Id b, bool ta, bool tb) {
  Tensor out = matmul_raw(val(a), val(b), ta, tb);
  return push(std::move(out), [a, b, ta, tb](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    const Tensor& va = t.val(a);
    const Tensor& vb = t.val(b);
    Tensor ga, gb;
    if (!ta && !tb) {  // C = A B
      ga = matmul_raw(g, vb, false, true);
      gb = matmul_raw(va, g, true, false);
    } else if (ta && !tb) {  // C = A^T B
      ga = matmul_raw(vb, g, false, true);
      gb = matmul_raw(va, g, false, false);
    } else if (!ta && tb) {  // C = A B^T
      ga = matmul_raw(g, vb, false, false);
      gb = matmul_raw(g, va, true, false);
    } else {  // C = A^T B^T
      ga = matmul_raw(vb, g, true, true);
      gb = matmul_raw(g, va, true, true);
    }
    Tensor& gra = t.grad_ref(a);
    Tensor& grb = t.grad_ref(b);
    for (int i = 0; i < ga.size(); ++i) gra.data[i] += ga.data[i];
    for (int i = 0; i < gb.size(); ++i) grb.data[i] += gb.data[i];
  });
}

Tape::Id Tape::relu(Id a) {
  Tensor out = val(a);
  for (auto& x : out.data) x = std::max(0.0, x);
  return push(std::move(out), [a](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    const Tensor& x = t.val(a);
    Tensor& ga = t.grad_ref(a);
    for (int i = 0; i < g.size(); ++i)
      if (x.data[i] > 0.0) ga.data[i] += g.data[i];
  });
}

Tape::Id Tape::hinge(Id a) { return relu(a); }

Tape::Id Tape::gelu(Id a) {
  Tensor out = val(a);
  for (auto& x : out.data) {
    double u = kGeluC * (x + kGeluK * x * x * x);
    x = 0.5 * x * (1.0 + std::tanh(u));
  }
  return push(std::move(out), [a](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    const Tensor& xv = t.val(a);
    Tensor& ga = t.grad_ref(a);
    for (int i = 0; i < g.size(); ++i) {
      double x = xv.data[i];
      double u = kGeluC * (x + kGeluK * x * x * x);
      double th = std::tanh(u);
      double du = kGeluC * (1.0 + 3.0 * kGeluK * x * x);
      double d = 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * du;
      ga.data[i] += g.data[i] * d;
    }
  });
}

Tape::Id Tape::softmax_rows(Id a) {
  const Tensor& x = val(a);
  Tensor out(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i) {
    double m = x.at(i, 0);
    for (int j = 1; j < x.cols; ++j) m = std::max(m, x.at(i, j));
    double z = 0.0;
    for (int j = 0; j < x.cols; ++j) {
      out.at(i, j) = std::exp(x.at(i, j) - m);
      z += out.at(i, j);
    }
    for (int j = 0; j < x.cols; ++j) out.at(i, j) /= z;
  }
  return push(std::move(out), [a](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.val(self);
    Tensor& ga = t.grad_ref(a);
    for (int i = 0; i < y.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < y.cols; ++j) dot += g.at(i, j) * y.at(i, j);
      for (int j = 0; j < y.cols; ++j) ga.at(i, j) += y.at(i, j) * (g.at(i, j) - dot);
    }
  });
}

Tape::Id Tape::layer_norm_rows(Id a, double eps) {
  const Tensor& x = val(a);
  Tensor out(x.rows, x.cols);
  std::vector<double> inv_std(x.rows);
  for (int i = 0; i < x.rows; ++i) {
    double mu = 0.0;
    for (int j = 0; j < x.cols; ++j) mu += x.at(i, j);
    mu /= x.cols;
    double var = 0.0;
    for (int j = 0; j < x.cols; ++j) {
      double d = x.at(i, j) - mu;
      var += d * d;
    }
    var /= x.cols;
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (int j = 0; j < x.cols; ++j) out.at(i, j) = (x.at(i, j) - mu) * inv_std[i];
  }
  return push(std::move(out), [a, inv_std](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.val(self);
    Tensor& ga = t.grad_ref(a);
    int n = y.cols;
    for (int i = 0; i < y.rows; ++i) {
      double gm = 0.0, gym = 0.0;
      for (int j = 0; j < n; ++j) {
        gm += g.at(i, j);
        gym += g.at(i, j) * y.at(i, j);
      }
      gm /= n;
      gym /= n;
      for (int j = 0; j < n; ++j)
        ga.at(i, j) += inv_std[i] * (g.at(i, j) - gm - y.at(i, j) * gym);
    }
  });
}

Tape::Id Tape::gather_rows(Id a, std::vector<int> idx) {
  const Tensor& x = val(a);
  Tensor out(static_cast<int>(idx.size()), x.cols);
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= x.rows)
      throw std::invalid_argument("gather_rows: index out of range");
    for (int j = 0; j < x.cols; ++j) out.at(static_cast<int>(i), j) = x.at(idx[i], j);
  }
  return push(std::move(out), [a, idx = std::move(idx)](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(a);
    for (size_t i = 0; i < idx.size(); ++i)
      for (int j = 0; j < g.cols; ++j) ga.at(idx[i], j) += g.at(static_cast<int>(i), j);
  });
}

Tape::Id Tape::concat_cols(Id a, Id b) {
  const Tensor& x = val(a);
  const Tensor& y = val(b);
  if (x.rows != y.rows)
    throw std::invalid_argument("concat_cols: row mismatch " + x.shape_str() + " vs " +
                                y.shape_str());
  Tensor out(x.rows, x.cols + y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int j = 0; j < x.cols; ++j) out.at(i, j) = x.at(i, j);
    for (int j = 0; j < y.cols; ++j) out.at(i, x.cols + j) = y.at(i, j);
  }
  return push(std::move(out), [a, b](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_ref(a);
    Tensor& gb = t.grad_ref(b);
    for (int i = 0; i < g.rows; ++i) {
      for (int j = 0; j < ga.cols; ++j) ga.at(i, j) += g.at(i, j);
      for (int j = 0; j < gb.cols; ++j) gb.at(i, j) += g.at(i, ga.cols + j);
    }
  });
}

Tape::Id Tape::concat_rows(const std::vector<Id>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: empty");
  int cols = val(parts[0]).cols;
  int rows = 0;
  for (Id p : parts) {
    if (val(p).cols != cols) throw std::invalid_argument("concat_rows: col mismatch");
    rows += val(p).rows;
  }
  Tensor out(rows, cols);
  int r = 0;
  for (Id p : parts) {
    const Tensor& x = val(p);
    for (int i = 0; i < x.rows; ++i, ++r)
      for (int j = 0; j < cols; ++j) out.at(r, j) = x.at(i, j);
  }
  return push(std::move(out), [parts](Tape& t, Id self) {
    const Tensor& g = t.grad(self);
    int r = 0;
    for (Id p : parts) {
      Tensor& gp = t.grad_ref(p);
      for (int i = 0; i < gp.rows; ++i, ++r)
        for (int j = 0; j < g.cols; ++j) gp.at(i, j) += g.at(r, j);
    }
  });
}

Tape::Id Tape::l2_norm(Id a, double eps) {
  const Tensor& x = val(a);
  double s = eps;
  for (double v : x.data) s += v * v;
  double nrm = std::sqrt(s);
  return push(Tensor::scalar(nrm), [a, nrm](Tape& t, Id self) {
    double g = t.grad(self).data[0];
    const Tensor& x = t.val(a);
    Tensor& ga = t.grad_ref(a);
    for (int i = 0; i < x.size(); ++i) ga.data[i] += g * x.data[i] / nrm;
  });
}

Tape::Id Tape::mean_all(Id a) {
  const Tensor& x = val(a);
  double s = 0.0;
  for (double v : x.data) s += v;
  double n = static_cast<double>(x.size());
  return push(Tensor::scalar(s / n), [a, n](Tape& t, Id self) {
    double g = t.grad(self).data[0] / n;
    Tensor& ga = t.grad_ref(a);
    for (auto& v : ga.data) v += g;
  });
}

Tape::Id Tape::sum_all(Id a) {
  const Tensor& x = val(a);
  double s = 0.0;
  for (double v : x.data) s += v;
  return push(Tensor::scalar(s), [a](Tape& t, Id self) {
    double g = t.grad(self).data[0];
    Tensor& ga = t.grad_ref(a);
    for (auto& v : ga.data) v += g;
  });
}

Tape::Id Tape::cross_entropy_logits(Id logits, std::vector<int> targets) {
  const Tensor& x = val(logits);
  if (static_cast<int>(targets.size()) != x.rows)
    throw std::invalid_argument("cross_entropy_logits: target count != rows");
  Tensor out(x.rows, 1);
  Tensor probs(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i) {
    int t = targets[i];
    if (t < 0 || t >= x.cols)
      throw std::invalid_argument("cross_entropy_logits: target out of range");
    double m = x.at(i, 0);
    for (int j = 1; j < x.cols; ++j) m = std::max(m, x.at(i, j));
    double z = 0.0;
    for (int j = 0; j < x.cols; ++j) z += std::exp(x.at(i, j) - m);
    double lse = m + std::log(z);
    out.at(i, 0) = lse - x.at(i, t);
    for (int j = 0; j < x.cols; ++j) probs.at(i, j) = std::exp(x.at(i, j) - lse);
  }
  return push(std::move(out),
              [logits, targets = std::move(targets), probs = std::move(probs)](Tape& t, Id self) {
                const Tensor& g = t.grad(self);
                Tensor& gl = t.grad_ref(logits);
                for (int i = 0; i < probs.rows; ++i) {
                  double gi = g.at(i, 0);
                  for (int j = 0; j < probs.cols; ++j) gl.at(i, j) += gi * probs.at(i, j);
                  gl.at(i, targets[i]) -= gi;
                }
              });
}

void Tape::backward(Id root) {
  if (ran_backward_) throw std::logic_error("tape: backward already ran");
  ran_backward_ = true;
  if (val(root).size() != 1) throw std::logic_error("tape: backward root must be scalar");
  for (auto& n : nodes_) n.grad = Tensor::zeros(n.value.rows, n.value.cols);
  nodes_[root].grad.data[0] = 1.0;
  for (Id i = static_cast<Id>(nodes_.size()) - 1; i >= 0; --i) {
    if (nodes_[i].back) nodes_[i].back(*this, i);
  }
}

}  // namespace kgalign
