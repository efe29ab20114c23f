#include "lw/num/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "lw/num/kernels.hpp"

namespace lw::num {

namespace {

std::size_t shape_size(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor: non-positive dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

std::vector<double>& ensure_grad(TensorNode& n) {
  if (n.grad.size() != n.data.size()) n.grad.assign(n.data.size(), 0.0);
  return n.grad;
}

}  // namespace

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(std::vector<int> shape, double value, bool requires_grad) {
  auto n = std::make_shared<TensorNode>();
  const std::size_t sz = shape_size(shape);
  n->shape = std::move(shape);
  n->data.assign(sz, value);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::from_data(std::vector<int> shape, std::vector<double> data, bool requires_grad) {
  if (shape_size(shape) != data.size())
    throw std::invalid_argument("tensor: data length does not match shape");
  auto n = std::make_shared<TensorNode>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from_data({1}, {value}, requires_grad);
}

int Tensor::rows() const {
  if (node_->shape.size() != 2) throw std::invalid_argument("tensor: not 2-D");
  return node_->shape[0];
}

int Tensor::cols() const {
  if (node_->shape.size() != 2) throw std::invalid_argument("tensor: not 2-D");
  return node_->shape[1];
}

void Tensor::zero_grad() { node_->grad.assign(node_->data.size(), 0.0); }

double Tensor::value() const {
  if (node_->data.size() != 1) throw std::invalid_argument("tensor: value() needs size 1");
  return node_->data[0];
}

double Tensor::at(int i, int j) const {
  return node_->data[static_cast<std::size_t>(i) * cols() + j];
}

double& Tensor::at(int i, int j) {
  return node_->data[static_cast<std::size_t>(i) * cols() + j];
}

Tensor make_op(std::vector<int> shape, std::vector<std::shared_ptr<TensorNode>> parents,
               std::function<void(TensorNode&)> backward_fn) {
  auto n = std::make_shared<TensorNode>();
  n->shape = std::move(shape);
  n->data.resize(shape_size(n->shape));
  bool rg = false;
  for (auto& p : parents) rg = rg || p->requires_grad;
  n->requires_grad = rg;
  if (rg) {
    n->parents = std::move(parents);
    n->backward_fn = std::move(backward_fn);
  }
  Tensor t;
  t.node() = std::move(n);
  return t;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  auto pa = a.node(), pb = b.node();
  Tensor out = make_op(a.shape(), {pa, pb}, [pa, pb](TensorNode& n) {
    if (pa->requires_grad) kernels::axpy(1.0, n.grad.data(), ensure_grad(*pa).data(), n.grad.size());
    if (pb->requires_grad) kernels::axpy(1.0, n.grad.data(), ensure_grad(*pb).data(), n.grad.size());
  });
  kernels::apply_binary(pa->data.data(), pb->data.data(), out.data(), out.size(),
                        [](double x, double y) { return x + y; });
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  auto pa = a.node(), pb = b.node();
  Tensor out = make_op(a.shape(), {pa, pb}, [pa, pb](TensorNode& n) {
    if (pa->requires_grad) kernels::axpy(1.0, n.grad.data(), ensure_grad(*pa).data(), n.grad.size());
    if (pb->requires_grad) kernels::axpy(-1.0, n.grad.data(), ensure_grad(*pb).data(), n.grad.size());
  });
  kernels::apply_binary(pa->data.data(), pb->data.data(), out.data(), out.size(),
                        [](double x, double y) { return x - y; });
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  auto pa = a.node(), pb = b.node();
  Tensor out = make_op(a.shape(), {pa, pb}, [pa, pb](TensorNode& n) {
    const std::size_t sz = n.grad.size();
    if (pa->requires_grad) {
      auto& g = ensure_grad(*pa);
      for (std::size_t i = 0; i < sz; ++i) g[i] += n.grad[i] * pb->data[i];
    }
    if (pb->requires_grad) {
      auto& g = ensure_grad(*pb);
      for (std::size_t i = 0; i < sz; ++i) g[i] += n.grad[i] * pa->data[i];
    }
  });
  kernels::apply_binary(pa->data.data(), pb->data.data(), out.data(), out.size(),
                        [](double x, double y) { return x * y; });
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  const int n = a.rows(), k = a.cols(), m = b.cols();
  if (b.rows() != k) throw std::invalid_argument("matmul: inner dimension mismatch");
  auto pa = a.node(), pb = b.node();
  Tensor out = make_op({n, m}, {pa, pb}, [pa, pb, n, k, m](TensorNode& nd) {
    if (pa->requires_grad) {
      // dA += dC * B^T
      std::vector<double> tmp(static_cast<std::size_t>(n) * k);
      kernels::matmul_nt(nd.grad.data(), pb->data.data(), tmp.data(), n, m, k);
      kernels::axpy(1.0, tmp.data(), ensure_grad(*pa).data(), tmp.size());
    }
    if (pb->requires_grad) {
      // dB += A^T * dC
      std::vector<double> tmp(static_cast<std::size_t>(k) * m);
      kernels::matmul_tn(pa->data.data(), nd.grad.data(), tmp.data(), n, k, m);
      kernels::axpy(1.0, tmp.data(), ensure_grad(*pb).data(), tmp.size());
    }
  });
  kernels::matmul(pa->data.data(), pb->data.data(), out.data(), n, k, m);
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  const int n = a.rows(), k = a.cols(), m = b.rows();
  if (b.cols() != k) throw std::invalid_argument("matmul_nt: inner dimension mismatch");
  auto pa = a.node(), pb = b.node();
  Tensor out = make_op({n, m}, {pa, pb}, [pa, pb, n, k, m](TensorNode& nd) {
    if (pa->requires_grad) {
      // dA += dC * B
      std::vector<double> tmp(static_cast<std::size_t>(n) * k);
      kernels::matmul(nd.grad.data(), pb->data.data(), tmp.data(), n, m, k);
      kernels::axpy(1.0, tmp.data(), ensure_grad(*pa).data(), tmp.size());
    }
    if (pb->requires_grad) {
      // dB += dC^T * A
      std::vector<double> tmp(static_cast<std::size_t>(m) * k);
      kernels::matmul_tn(nd.grad.data(), pa->data.data(), tmp.data(), n, m, k);
      kernels::axpy(1.0, tmp.data(), ensure_grad(*pb).data(), tmp.size());
    }
  });
  kernels::matmul_nt(pa->data.data(), pb->data.data(), out.data(), n, k, m);
  return out;
}

Tensor add_rowvec(const Tensor& m, const Tensor& v) {
  const int n = m.rows(), d = m.cols();
  if (static_cast<int>(v.size()) != d) throw std::invalid_argument("add_rowvec: width mismatch");
  auto pm = m.node(), pv = v.node();
  Tensor out = make_op({n, d}, {pm, pv}, [pm, pv, n, d](TensorNode& nd) {
    if (pm->requires_grad) kernels::axpy(1.0, nd.grad.data(), ensure_grad(*pm).data(), nd.grad.size());
    if (pv->requires_grad) {
      auto& g = ensure_grad(*pv);
      for (int i = 0; i < n; ++i) {
        const double* row = nd.grad.data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) g[j] += row[j];
      }
    }
  });
  for (int i = 0; i < n; ++i) {
    const double* src = pm->data.data() + static_cast<std::size_t>(i) * d;
    double* dst = out.data() + static_cast<std::size_t>(i) * d;
    for (int j = 0; j < d; ++j) dst[j] = src[j] + pv->data[j];
  }
  return out;
}

namespace {

template <class Fwd, class Bwd>
Tensor unary_op(const Tensor& a, Fwd fwd, Bwd dfn) {
  auto pa = a.node();
  Tensor out = make_op(a.shape(), {pa}, [pa, dfn](TensorNode& n) {
    auto& g = ensure_grad(*pa);
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      g[i] += n.grad[i] * dfn(pa->data[i], n.data[i]);
  });
  kernels::apply_unary(pa->data.data(), out.data(), out.size(), fwd);
  return out;
}

}  // namespace

Tensor tanh(const Tensor& a) {
  return unary_op(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& a) {
  return unary_op(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor exp(const Tensor& a) {
  return unary_op(
      a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary_op(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor scale(const Tensor& a, double c) {
  auto pa = a.node();
  Tensor out = make_op(a.shape(), {pa}, [pa, c](TensorNode& n) {
    kernels::axpy(c, n.grad.data(), ensure_grad(*pa).data(), n.grad.size());
  });
  kernels::apply_unary(pa->data.data(), out.data(), out.size(), [c](double x) { return c * x; });
  return out;
}

Tensor add_scalar(const Tensor& a, double c) {
  auto pa = a.node();
  Tensor out = make_op(a.shape(), {pa}, [pa](TensorNode& n) {
    kernels::axpy(1.0, n.grad.data(), ensure_grad(*pa).data(), n.grad.size());
  });
  kernels::apply_unary(pa->data.data(), out.data(), out.size(), [c](double x) { return x + c; });
  return out;
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  auto pa = a.node();
  Tensor out = make_op(a.shape(), {pa}, [pa, lo, hi](TensorNode& n) {
    auto& g = ensure_grad(*pa);
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      const double x = pa->data[i];
      if (x >= lo && x <= hi) g[i] += n.grad[i];
    }
  });
  kernels::apply_unary(pa->data.data(), out.data(), out.size(), [lo, hi](double x) {
    return x < lo ? lo : (x > hi ? hi : x);
  });
  return out;
}

Tensor sum(const Tensor& a) {
  auto pa = a.node();
  Tensor out = make_op({1}, {pa}, [pa](TensorNode& n) {
    auto& g = ensure_grad(*pa);
    const double go = n.grad[0];
    for (auto& v : g) v += go;
  });
  out.data()[0] = kernels::sum(pa->data.data(), pa->data.size());
  return out;
}

Tensor mean(const Tensor& a) {
  auto pa = a.node();
  const double inv = 1.0 / static_cast<double>(a.size());
  Tensor out = make_op({1}, {pa}, [pa, inv](TensorNode& n) {
    auto& g = ensure_grad(*pa);
    const double go = n.grad[0] * inv;
    for (auto& v : g) v += go;
  });
  out.data()[0] = kernels::sum(pa->data.data(), pa->data.size()) * inv;
  return out;
}

Tensor slice_cols(const Tensor& a, int c0, int len) {
  const int n = a.rows(), d = a.cols();
  if (c0 < 0 || len <= 0 || c0 + len > d) throw std::invalid_argument("slice_cols: out of range");
  auto pa = a.node();
  Tensor out = make_op({n, len}, {pa}, [pa, c0, len, n, d](TensorNode& nd) {
    auto& g = ensure_grad(*pa);
    for (int i = 0; i < n; ++i) {
      const double* src = nd.grad.data() + static_cast<std::size_t>(i) * len;
      double* dst = g.data() + static_cast<std::size_t>(i) * d + c0;
      for (int j = 0; j < len; ++j) dst[j] += src[j];
    }
  });
  for (int i = 0; i < n; ++i) {
    const double* src = pa->data.data() + static_cast<std::size_t>(i) * d + c0;
    double* dst = out.data() + static_cast<std::size_t>(i) * len;
    for (int j = 0; j < len; ++j) dst[j] = src[j];
  }
  return out;
}

void backward(Tensor root) {
  if (!root.defined()) throw std::invalid_argument("backward: undefined tensor");
  if (root.size() != 1) throw std::invalid_argument("backward: root must be a scalar");
  auto* rn = root.node().get();
  if (!rn->requires_grad) return;

  // iterative post-order topological sort over the tape
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> visited;
  std::vector<std::pair<TensorNode*, std::size_t>> stack;
  stack.emplace_back(rn, 0);
  visited.insert(rn);
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      TensorNode* p = node->parents[idx++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (TensorNode* n : order) n->grad.assign(n->data.size(), 0.0);
  rn->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* n = *it;
    if (n->backward_fn) n->backward_fn(*n);
  }
  // clear the tape; leaf grads survive
  for (TensorNode* n : order) {
    n->parents.clear();
    n->backward_fn = nullptr;
  }
}

}  // namespace lw::num
