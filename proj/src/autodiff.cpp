#include "uvg/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "uvg/error.hpp"

namespace uvg {

void gemm_acc(const double* a, const double* b, double* c, std::size_t n, std::size_t k, std::size_t m) {
  // i-p-j order: each c[i][j] accumulates over p in a fixed sequence, so rows
  // are bitwise independent of how the batch is chunked.
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* bp = b + p * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += aip * bp[j];
    }
  }
}

void softmax_rows(double* data, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* x = data + r * cols;
    const double mx = *std::max_element(x, x + cols);
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      x[j] = std::exp(x[j] - mx);
      sum += x[j];
    }
    for (std::size_t j = 0; j < cols; ++j) x[j] /= sum;
  }
}

namespace {

// c(n,m) += a(n,k) * b(m,k)^T
void gemm_nt_acc(const double* a, const double* b, double* c, std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[j * k + p];
      c[i * m + j] += s;
    }
}

// c(k,m) += a(n,k)^T * b(n,m)
void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      for (std::size_t j = 0; j < m; ++j) c[p * m + j] += aip * b[i * m + j];
    }
}

}  // namespace

Tape::Var Tape::push(Array value, bool requires_grad, std::function<void()> back) {
  nodes_.push_back(Node{std::move(value), Array(), requires_grad, std::move(back)});
  return Var{nodes_.size() - 1};
}

Tape::Var Tape::leaf(Array value, bool requires_grad) { return push(std::move(value), requires_grad, nullptr); }

Array& Tape::grad_ref(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.shape() != n.value.shape()) n.grad = Array(n.value.shape());
  return n.grad;
}

Array Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  return n.grad.shape() == n.value.shape() ? n.grad : Array(n.value.shape());
}

Tape::Var Tape::matmul(Var a, Var b) {
  const Array &A = value(a), &B = value(b);
  if (A.rank() != 2 || B.rank() != 2 || A.dim(1) != B.dim(0)) {
    throw InvalidArgument("matmul: incompatible shapes " + shape_string(A.shape()) + " x " +
                          shape_string(B.shape()));
  }
  const std::size_t n = A.dim(0), k = A.dim(1), m = B.dim(1);
  Array out({n, m});
  gemm_acc(A.data(), B.data(), out.data(), n, k, m);
  const bool rg = needs(a) || needs(b);
  Var o{nodes_.size()};
  return push(std::move(out), rg, [this, a, b, o, n, k, m] {
    const Array& g = nodes_[o.id].grad;
    if (needs(a)) gemm_nt_acc(g.data(), value(b).data(), grad_ref(a.id).data(), n, m, k);
    if (needs(b)) gemm_tn_acc(value(a).data(), g.data(), grad_ref(b.id).data(), n, k, m);
  });
}

Tape::Var Tape::bmm(Var a, Var b) {
  const Array &A = value(a), &B = value(b);
  if (A.rank() != 3 || B.rank() != 3 || A.dim(0) != B.dim(0) || A.dim(2) != B.dim(1)) {
    throw InvalidArgument("bmm: incompatible shapes " + shape_string(A.shape()) + " x " +
                          shape_string(B.shape()));
  }
  const std::size_t bs = A.dim(0), p = A.dim(1), k = A.dim(2), d = B.dim(2);
  Array out({bs, p, d});
  for (std::size_t i = 0; i < bs; ++i) gemm_acc(A.data() + i * p * k, B.data() + i * k * d, out.data() + i * p * d, p, k, d);
  const bool rg = needs(a) || needs(b);
  Var o{nodes_.size()};
  return push(std::move(out), rg, [this, a, b, o, bs, p, k, d] {
    const Array& g = nodes_[o.id].grad;
    for (std::size_t i = 0; i < bs; ++i) {
      if (needs(a))
        gemm_nt_acc(g.data() + i * p * d, value(b).data() + i * k * d, grad_ref(a.id).data() + i * p * k, p, d, k);
      if (needs(b))
        gemm_tn_acc(value(a).data() + i * p * k, g.data() + i * p * d, grad_ref(b.id).data() + i * k * d, p, k, d);
    }
  });
}

Tape::Var Tape::bmm_nt(Var a, Var b) {
  const Array &A = value(a), &B = value(b);
  if (A.rank() != 3 || B.rank() != 3 || A.dim(0) != B.dim(0) || A.dim(2) != B.dim(2)) {
    throw InvalidArgument("bmm_nt: incompatible shapes " + shape_string(A.shape()) + " x " +
                          shape_string(B.shape()));
  }
  const std::size_t bs = A.dim(0), p = A.dim(1), d = A.dim(2), k = B.dim(1);
  Array out({bs, p, k});
  for (std::size_t i = 0; i < bs; ++i)
    gemm_nt_acc(A.data() + i * p * d, B.data() + i * k * d, out.data() + i * p * k, p, d, k);
  const bool rg = needs(a) || needs(b);
  Var o{nodes_.size()};
  return push(std::move(out), rg, [this, a, b, o, bs, p, d, k] {
    const Array& g = nodes_[o.id].grad;
    for (std::size_t i = 0; i < bs; ++i) {
      // dA = G B, dB = G^T A
      if (needs(a)) gemm_acc(g.data() + i * p * k, value(b).data() + i * k * d, grad_ref(a.id).data() + i * p * d, p, k, d);
      if (needs(b))
        gemm_tn_acc(g.data() + i * p * k, value(a).data() + i * p * d, grad_ref(b.id).data() + i * k * d, p, k, d);
    }
  });
}

Tape::Var Tape::add(Var a, Var b) {
  Array out = value(a) + value(b);
  Var o{nodes_.size()};
  return push(std::move(out), needs(a) || needs(b), [this, a, b, o] {
    const Array& g = nodes_[o.id].grad;
    for (Var v : {a, b}) {
      if (!needs(v)) continue;
      Array& ga = grad_ref(v.id);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
  });
}

Tape::Var Tape::add_bias(Var a, Var bias) {
  const Array &A = value(a), &c = value(bias);
  if (c.rank() != 1 || A.rank() == 0 || A.shape().back() != c.dim(0)) {
    throw InvalidArgument("add_bias: incompatible shapes " + shape_string(A.shape()) + " + " +
                          shape_string(c.shape()));
  }
  const std::size_t m = c.dim(0), rows = A.size() / m;
  Array out = A;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < m; ++j) out[r * m + j] += c[j];
  Var o{nodes_.size()};
  return push(std::move(out), needs(a) || needs(bias), [this, a, bias, o, m, rows] {
    const Array& g = nodes_[o.id].grad;
    if (needs(a)) {
      Array& ga = grad_ref(a.id);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (needs(bias)) {
      Array& gb = grad_ref(bias.id);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < m; ++j) gb[j] += g[r * m + j];
    }
  });
}

Tape::Var Tape::mul(Var a, Var b) {
  const Array &A = value(a), &B = value(b);
  require_same_shape(A, B, "mul");
  Array out(A.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = A[i] * B[i];
  Var o{nodes_.size()};
  return push(std::move(out), needs(a) || needs(b), [this, a, b, o] {
    const Array& g = nodes_[o.id].grad;
    // Gradients read the other operand's value; safe when a and b alias.
    if (needs(a)) {
      Array& ga = grad_ref(a.id);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * value(b)[i];
    }
    if (needs(b)) {
      Array& gb = grad_ref(b.id);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * value(a)[i];
    }
  });
}

Tape::Var Tape::scale(Var a, double s) {
  Array out = s * value(a);
  Var o{nodes_.size()};
  return push(std::move(out), needs(a), [this, a, o, s] {
    const Array& g = nodes_[o.id].grad;
    Array& ga = grad_ref(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
  });
}

Tape::Var Tape::tanh(Var a) {
  Array out = value(a);
  for (double& v : out.values()) v = std::tanh(v);
  Var o{nodes_.size()};
  return push(std::move(out), needs(a), [this, a, o] {
    const Array& g = nodes_[o.id].grad;
    const Array& y = nodes_[o.id].value;
    Array& ga = grad_ref(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Tape::Var Tape::softmax(Var a) {
  Array out = value(a);
  if (out.rank() == 0) throw InvalidArgument("softmax of a scalar");
  const std::size_t cols = out.shape().back(), rows = out.size() / cols;
  softmax_rows(out.data(), rows, cols);
  Var o{nodes_.size()};
  return push(std::move(out), needs(a), [this, a, o, rows, cols] {
    const Array& g = nodes_[o.id].grad;
    const Array& y = nodes_[o.id].value;
    Array& ga = grad_ref(a.id);
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t j = 0; j < cols; ++j) dot += g[r * cols + j] * y[r * cols + j];
      for (std::size_t j = 0; j < cols; ++j) ga[r * cols + j] += y[r * cols + j] * (g[r * cols + j] - dot);
    }
  });
}

Tape::Var Tape::concat(Var a, Var b) {
  const Array &A = value(a), &B = value(b);
  if (A.rank() != 2 || B.rank() != 2 || A.dim(0) != B.dim(0)) {
    throw InvalidArgument("concat: incompatible shapes " + shape_string(A.shape()) + ", " +
                          shape_string(B.shape()));
  }
  const std::size_t n = A.dim(0), ka = A.dim(1), kb = B.dim(1);
  Array out({n, ka + kb});
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(A.data() + i * ka, ka, out.data() + i * (ka + kb));
    std::copy_n(B.data() + i * kb, kb, out.data() + i * (ka + kb) + ka);
  }
  Var o{nodes_.size()};
  return push(std::move(out), needs(a) || needs(b), [this, a, b, o, n, ka, kb] {
    const Array& g = nodes_[o.id].grad;
    if (needs(a)) {
      Array& ga = grad_ref(a.id);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < ka; ++j) ga[i * ka + j] += g[i * (ka + kb) + j];
    }
    if (needs(b)) {
      Array& gb = grad_ref(b.id);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < kb; ++j) gb[i * kb + j] += g[i * (ka + kb) + ka + j];
    }
  });
}

Tape::Var Tape::reshape(Var a, Shape shape) {
  Array out = value(a).reshaped(std::move(shape));
  Var o{nodes_.size()};
  return push(std::move(out), needs(a), [this, a, o] {
    const Array& g = nodes_[o.id].grad;
    Array& ga = grad_ref(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

void Tape::backward(Var out, const Array& seed) {
  if (out.id >= nodes_.size()) throw StateError("backward: output is not on this tape");
  require_same_shape(value(out), seed, "backward seed");
  for (Node& n : nodes_) n.grad = Array();
  grad_ref(out.id) = seed;
  for (std::size_t i = out.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.back && n.requires_grad && n.grad.shape() == n.value.shape()) n.back();
  }
}

}  // namespace uvg
