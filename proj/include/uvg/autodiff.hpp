#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "uvg/array.hpp"

namespace uvg {

/// Reverse-mode tape over a fixed op set. Ops append nodes; backward walks
/// them in reverse. A tape must not be moved once ops reference it, so it is
/// non-copyable and usually held by pointer.
class Tape {
 public:
  struct Var {
    std::size_t id = static_cast<std::size_t>(-1);
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Array value, bool requires_grad = false);

  const Array& value(Var v) const { return nodes_.at(v.id).value; }
  /// Gradient of the seeded output w.r.t. v; zeros if v is off the path.
  Array grad(Var v) const;

  /// (n,k) x (k,m)
  Var matmul(Var a, Var b);
  /// Batched (B,P,K) x (B,K,d) -> (B,P,d)
  Var bmm(Var a, Var b);
  /// Batched (B,P,d) x (B,K,d)^T -> (B,P,K)
  Var bmm_nt(Var a, Var b);
  Var add(Var a, Var b);
  /// a (..., m) plus bias (m) broadcast over leading axes.
  Var add_bias(Var a, Var bias);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  Var tanh(Var a);
  /// Softmax over the last axis.
  Var softmax(Var a);
  /// Concatenate two 2-D arrays along the last axis.
  Var concat(Var a, Var b);
  Var reshape(Var a, Shape shape);

  /// Seeds d(out) = seed and accumulates into every upstream node.
  void backward(Var out, const Array& seed);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Array value;
    Array grad;
    bool requires_grad = false;
    std::function<void()> back;
  };

  Var push(Array value, bool requires_grad, std::function<void()> back);
  Array& grad_ref(std::size_t id);
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }

  std::vector<Node> nodes_;
};

// Plain kernels shared by the tape and non-recorded code paths.
/// c += a (n,k) x b (k,m)
void gemm_acc(const double* a, const double* b, double* c, std::size_t n, std::size_t k, std::size_t m);
void softmax_rows(double* data, std::size_t rows, std::size_t cols);

}  // namespace uvg
