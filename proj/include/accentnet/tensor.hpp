#ifndef ACCENTNET_TENSOR_HPP
#define ACCENTNET_TENSOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "accentnet/error.hpp"

namespace accentnet {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // sized lazily; same length as value once allocated
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
  }
};

// Graph recording is suppressed inside NoGradGuard scopes (evaluation passes).
inline bool& grad_mode_flag() {
  thread_local bool enabled = true;
  return enabled;
}

}  // namespace detail

struct NoGradGuard {
  bool prev;
  NoGradGuard() : prev(detail::grad_mode_flag()) { detail::grad_mode_flag() = false; }
  ~NoGradGuard() { detail::grad_mode_flag() = prev; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

inline bool grad_enabled() { return detail::grad_mode_flag(); }

struct BackwardStats {
  std::size_t reachable_nodes = 0;  // nodes discovered by the topological walk
  std::size_t ops_executed = 0;     // backward rules invoked (once per recorded op)
};

template <typename T>
class Tensor {
 public:
  using Node = detail::Node<T>;

  Tensor() = default;

  explicit Tensor(Shape shape, T fill = T(0), bool requires_grad = false)
      : node_(std::make_shared<Node>()) {
    node_->shape = std::move(shape);
    node_->value.assign(shape_numel(node_->shape), fill);
    node_->requires_grad = requires_grad;
  }

  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false)
      : node_(std::make_shared<Node>()) {
    if (values.size() != shape_numel(shape))
      internal_error("tensor data length " + std::to_string(values.size()) +
                     " does not match shape " + shape_str(shape));
    node_->shape = std::move(shape);
    node_->value = std::move(values);
    node_->requires_grad = requires_grad;
  }

  static Tensor scalar(T v, bool requires_grad = false) {
    return Tensor(Shape{1}, std::vector<T>{v}, requires_grad);
  }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t i) const { return node_->shape[i]; }
  std::size_t size() const { return node_->value.size(); }

  std::vector<T>& values() { return node_->value; }
  const std::vector<T>& values() const { return node_->value; }

  T item() const {
    check_internal(size() == 1, "item() on non-scalar tensor " + shape_str(shape()));
    return node_->value[0];
  }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool b) { node_->requires_grad = b; }

  const std::vector<T>& grad() const {
    node_->ensure_grad();
    return node_->grad;
  }
  std::vector<T>& grad() {
    node_->ensure_grad();
    return node_->grad;
  }

  void zero_grad() {
    node_->ensure_grad();
    std::fill(node_->grad.begin(), node_->grad.end(), T(0));
  }

  std::shared_ptr<Node> node() const { return node_; }

  BackwardStats backward() const;

 private:
  std::shared_ptr<Node> node_;
};

namespace detail {

// Builds the result node of an op. When grad mode is off or no input needs
// gradients, the graph edge and backward rule are dropped.
template <typename T, typename F>
Tensor<T> make_op(Shape shape, std::vector<T> value, std::vector<Tensor<T>> parents, F&& fn) {
  bool track = grad_mode_flag();
  bool any_grad = false;
  if (track) {
    for (const auto& p : parents) any_grad = any_grad || p.requires_grad();
  }
  Tensor<T> out(std::move(shape), std::move(value), track && any_grad);
  if (track && any_grad) {
    auto n = out.node();
    n->parents.reserve(parents.size());
    for (auto& p : parents) n->parents.push_back(p.node());
    n->backward_fn = std::forward<F>(fn);
  }
  return out;
}

}  // namespace detail

template <typename T>
BackwardStats Tensor<T>::backward() const {
  check_internal(defined(), "backward() on undefined tensor");
  if (size() != 1) internal_error("backward() root must be scalar, got shape " + shape_str(shape()));
  if (!node_->backward_fn && !node_->requires_grad)
    internal_error("backward() on a detached graph: root records no operation and requires no grad");

  // Iterative post-order DFS: children visited after all parents were pushed,
  // giving a topological order with the root last.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, idx] = stack.back();
    if (idx < n->parents.size()) {
      Node* p = n->parents[idx].get();
      ++idx;
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->ensure_grad();
  node_->grad[0] = T(1);

  BackwardStats stats;
  stats.reachable_nodes = order.size();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn) {
      n->backward_fn(*n);
      ++stats.ops_executed;
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Elementwise operations. Binary ops accept equal shapes or a right operand
// whose shape is a trailing suffix of the left one (leading-dim broadcast).
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void check_suffix_broadcast(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (bs.size() > as.size())
    internal_error(std::string(op) + ": right operand rank exceeds left, " + shape_str(as) +
                   " vs " + shape_str(bs));
  std::size_t off = as.size() - bs.size();
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (as[off + i] != bs[i])
      internal_error(std::string(op) + ": shape mismatch " + shape_str(as) + " vs " +
                     shape_str(bs));
  }
}

}  // namespace detail

template <typename T, typename Fwd, typename BwdA, typename BwdB>
Tensor<T> binary_elementwise(const Tensor<T>& a, const Tensor<T>& b, const char* name, Fwd fwd,
                             BwdA dfa, BwdB dfb) {
  detail::check_suffix_broadcast(a, b, name);
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  std::vector<T> out(na);
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < na; ++i) out[i] = fwd(av[i], bv[i % nb]);
  return detail::make_op<T>(
      a.shape(), std::move(out), {a, b}, [na, nb, dfa, dfb](detail::Node<T>& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        if (pa.requires_grad) {
          pa.ensure_grad();
          for (std::size_t i = 0; i < na; ++i)
            pa.grad[i] += self.grad[i] * dfa(pa.value[i], pb.value[i % nb]);
        }
        if (pb.requires_grad) {
          pb.ensure_grad();
          for (std::size_t i = 0; i < na; ++i)
            pb.grad[i % nb] += self.grad[i] * dfb(pa.value[i], pb.value[i % nb]);
        }
      });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_elementwise(
      a, b, "add", [](T x, T y) { return x + y; }, [](T, T) { return T(1); },
      [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_elementwise(
      a, b, "sub", [](T x, T y) { return x - y; }, [](T, T) { return T(1); },
      [](T, T) { return T(-1); });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary_elementwise(
      a, b, "mul", [](T x, T y) { return x * y; }, [](T, T y) { return y; },
      [](T x, T) { return x; });
}

template <typename T, typename Fwd, typename Bwd>
Tensor<T> unary_elementwise(const Tensor<T>& a, Fwd fwd, Bwd dfdx) {
  const std::size_t n = a.size();
  std::vector<T> out(n);
  const auto& av = a.values();
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(av[i]);
  return detail::make_op<T>(a.shape(), std::move(out), {a}, [n, dfdx](detail::Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (std::size_t i = 0; i < n; ++i) p.grad[i] += self.grad[i] * dfdx(p.value[i], self.value[i]);
  });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  // Subgradient at 0 is taken as 0.
  return unary_elementwise(
      a, [](T x) { return x > T(0) ? x : T(0); }, [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  return unary_elementwise(
      a,
      [](T x) {
        if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
        T e = std::exp(x);
        return e / (T(1) + e);
      },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> log(const Tensor<T>& a) {
  return unary_elementwise(
      a, [](T x) { return std::log(x); }, [](T x, T) { return T(1) / x; });
}

template <typename T>
Tensor<T> exp(const Tensor<T>& a) {
  return unary_elementwise(
      a, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T s) {
  return unary_elementwise(
      a, [s](T x) { return s * x; }, [s](T, T) { return s; });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T acc = T(0);
  for (T v : a.values()) acc += v;
  const std::size_t n = a.size();
  return detail::make_op<T>(Shape{1}, std::vector<T>{acc}, {a}, [n](detail::Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (std::size_t i = 0; i < n; ++i) p.grad[i] += self.grad[0];
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  return scale(sum(a), T(1) / static_cast<T>(a.size()));
}

// ---------------------------------------------------------------------------
// Shape manipulation
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (shape_numel(shape) != a.size())
    internal_error("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
  return detail::make_op<T>(std::move(shape), a.values(), {a}, [](detail::Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) p.grad[i] += self.grad[i];
  });
}

// Contiguous slice along one axis.
template <typename T>
Tensor<T> narrow(const Tensor<T>& a, std::size_t axis, std::size_t start, std::size_t len) {
  const Shape& s = a.shape();
  check_internal(axis < s.size(), "narrow: axis out of range");
  check_internal(start + len <= s[axis], "narrow: slice out of range");
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  Shape out_shape = s;
  out_shape[axis] = len;
  std::vector<T> out(outer * len * inner);
  const auto& av = a.values();
  const std::size_t in_stride = s[axis] * inner;
  for (std::size_t o = 0; o < outer; ++o) {
    const T* src = av.data() + o * in_stride + start * inner;
    T* dst = out.data() + o * len * inner;
    std::copy(src, src + len * inner, dst);
  }
  return detail::make_op<T>(std::move(out_shape), std::move(out), {a},
                            [outer, inner, len, start, in_stride](detail::Node<T>& self) {
                              auto& p = *self.parents[0];
                              if (!p.requires_grad) return;
                              p.ensure_grad();
                              for (std::size_t o = 0; o < outer; ++o) {
                                T* dst = p.grad.data() + o * in_stride + start * inner;
                                const T* src = self.grad.data() + o * len * inner;
                                for (std::size_t i = 0; i < len * inner; ++i) dst[i] += src[i];
                              }
                            });
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis) {
  check_internal(!parts.empty(), "concat: no inputs");
  const Shape& s0 = parts[0].shape();
  check_internal(axis < s0.size(), "concat: axis out of range");
  std::size_t axis_total = 0;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != s0.size()) internal_error("concat: rank mismatch");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i != axis && s[i] != s0[i])
        internal_error("concat: ragged shapes " + shape_str(s0) + " vs " + shape_str(s) +
                       " on axis " + std::to_string(i));
    }
    axis_total += s[axis];
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s0[i];
  for (std::size_t i = axis + 1; i < s0.size(); ++i) inner *= s0[i];

  Shape out_shape = s0;
  out_shape[axis] = axis_total;
  std::vector<T> out(outer * axis_total * inner);
  std::vector<std::size_t> part_axis(parts.size());
  std::size_t off = 0;
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    const std::size_t plen = parts[pi].shape()[axis];
    part_axis[pi] = plen;
    const auto& pv = parts[pi].values();
    for (std::size_t o = 0; o < outer; ++o) {
      const T* src = pv.data() + o * plen * inner;
      T* dst = out.data() + o * axis_total * inner + off * inner;
      std::copy(src, src + plen * inner, dst);
    }
    off += plen;
  }
  return detail::make_op<T>(std::move(out_shape), std::move(out), parts,
                            [outer, inner, axis_total, part_axis](detail::Node<T>& self) {
                              std::size_t off = 0;
                              for (std::size_t pi = 0; pi < self.parents.size(); ++pi) {
                                auto& p = *self.parents[pi];
                                const std::size_t plen = part_axis[pi];
                                if (p.requires_grad) {
                                  p.ensure_grad();
                                  for (std::size_t o = 0; o < outer; ++o) {
                                    const T* src =
                                        self.grad.data() + o * axis_total * inner + off * inner;
                                    T* dst = p.grad.data() + o * plen * inner;
                                    for (std::size_t i = 0; i < plen * inner; ++i) dst[i] += src[i];
                                  }
                                }
                                off += plen;
                              }
                            });
}

template <typename T>
std::vector<Tensor<T>> split(const Tensor<T>& a, std::size_t parts, std::size_t axis) {
  check_internal(parts >= 1, "split: parts must be >= 1");
  const Shape& s = a.shape();
  check_internal(axis < s.size(), "split: axis out of range");
  if (s[axis] % parts != 0)
    internal_error("split: axis length " + std::to_string(s[axis]) + " not divisible into " +
                   std::to_string(parts) + " parts");
  const std::size_t len = s[axis] / parts;
  std::vector<Tensor<T>> out;
  out.reserve(parts);
  for (std::size_t i = 0; i < parts; ++i) out.push_back(narrow(a, axis, i * len, len));
  return out;
}

// ---------------------------------------------------------------------------
// Softmax / cross-entropy
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> softmax(const Tensor<T>& a, std::size_t axis) {
  const Shape& s = a.shape();
  check_internal(axis < s.size(), "softmax: axis out of range");
  std::size_t outer = 1, inner = 1;
  const std::size_t d = s[axis];
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  std::vector<T> out(a.size());
  const auto& av = a.values();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * d * inner + in;
      T mx = av[base];
      for (std::size_t j = 1; j < d; ++j) mx = std::max(mx, av[base + j * inner]);
      T z = T(0);
      for (std::size_t j = 0; j < d; ++j) {
        T e = std::exp(av[base + j * inner] - mx);
        out[base + j * inner] = e;
        z += e;
      }
      for (std::size_t j = 0; j < d; ++j) out[base + j * inner] /= z;
    }
  }
  return detail::make_op<T>(s, std::move(out), {a}, [outer, inner, d](detail::Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        const std::size_t base = o * d * inner + in;
        T dot = T(0);
        for (std::size_t j = 0; j < d; ++j)
          dot += self.grad[base + j * inner] * self.value[base + j * inner];
        for (std::size_t j = 0; j < d; ++j) {
          const std::size_t ix = base + j * inner;
          p.grad[ix] += self.value[ix] * (self.grad[ix] - dot);
        }
      }
    }
  });
}

// Mean negative log-likelihood over the batch; logits (N,C), integer labels.
template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels) {
  const Shape& s = logits.shape();
  check_internal(s.size() == 2, "cross_entropy: logits must be (N,C)");
  const std::size_t n = s[0], c = s[1];
  check_internal(labels.size() == n, "cross_entropy: label count mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c)
      internal_error("cross_entropy: label " + std::to_string(labels[i]) + " out of range [0," +
                     std::to_string(c) + ") at row " + std::to_string(i));
  }
  const auto& lv = logits.values();
  // Saved softmax rows drive the backward rule.
  auto probs = std::make_shared<std::vector<T>>(n * c);
  T loss = T(0);
  for (std::size_t i = 0; i < n; ++i) {
    const T* row = lv.data() + i * c;
    T mx = row[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    T z = T(0);
    for (std::size_t j = 0; j < c; ++j) {
      T e = std::exp(row[j] - mx);
      (*probs)[i * c + j] = e;
      z += e;
    }
    for (std::size_t j = 0; j < c; ++j) (*probs)[i * c + j] /= z;
    loss += std::log(z) + mx - row[labels[i]];
  }
  loss /= static_cast<T>(n);
  auto labels_copy = std::make_shared<std::vector<int>>(labels);
  return detail::make_op<T>(Shape{1}, std::vector<T>{loss}, {logits},
                            [n, c, probs, labels_copy](detail::Node<T>& self) {
                              auto& p = *self.parents[0];
                              if (!p.requires_grad) return;
                              p.ensure_grad();
                              const T g = self.grad[0] / static_cast<T>(n);
                              for (std::size_t i = 0; i < n; ++i) {
                                for (std::size_t j = 0; j < c; ++j) {
                                  T delta = (static_cast<std::size_t>((*labels_copy)[i]) == j)
                                                ? T(1)
                                                : T(0);
                                  p.grad[i * c + j] += g * ((*probs)[i * c + j] - delta);
                                }
                              }
                            });
}

}  // namespace accentnet

#endif
