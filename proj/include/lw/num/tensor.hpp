#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace lw::num {

// Dense 64-bit real tensor with reverse-mode autodiff. Ops record a
// define-by-run tape when any input requires grad; backward() walks the tape
// once and then clears it, so graphs are rebuilt per forward pass. Tensor is
// a cheap value handle onto a shared node.

struct TensorNode {
  std::vector<int> shape;
  std::vector<double> data;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward_fn;
};

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor full(std::vector<int> shape, double value, bool requires_grad = false);
  static Tensor from_data(std::vector<int> shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(node_); }
  const std::vector<int>& shape() const { return node_->shape; }
  std::size_t size() const { return node_->data.size(); }
  int rows() const;
  int cols() const;

  double* data() { return node_->data.data(); }
  const double* data() const { return node_->data.data(); }
  std::vector<double>& data_vec() { return node_->data; }
  const std::vector<double>& data_vec() const { return node_->data; }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool v) { node_->requires_grad = v; }
  const std::vector<double>& grad() const { return node_->grad; }
  void zero_grad();

  // scalar access (size-1 tensors)
  double value() const;

  double at(int i, int j) const;
  double& at(int i, int j);

  std::shared_ptr<TensorNode>& node() { return node_; }
  const std::shared_ptr<TensorNode>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<TensorNode> n) : node_(std::move(n)) {}
  std::shared_ptr<TensorNode> node_;

  friend Tensor make_op(std::vector<int> shape,
                        std::vector<std::shared_ptr<TensorNode>> parents,
                        std::function<void(TensorNode&)> backward_fn);
};

Tensor make_op(std::vector<int> shape, std::vector<std::shared_ptr<TensorNode>> parents,
               std::function<void(TensorNode&)> backward_fn);

// elementwise, identical shapes
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

// (n,k)x(k,m) and (n,k)x(m,k)^T
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_nt(const Tensor& a, const Tensor& b);

// row-broadcast bias add: (n,d) + (d)
Tensor add_rowvec(const Tensor& m, const Tensor& v);

Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);

Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
Tensor clamp(const Tensor& a, double lo, double hi);

// full reductions to a scalar (shape {1})
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

// column slice of a 2-D tensor: cols [c0, c0+len)
Tensor slice_cols(const Tensor& a, int c0, int len);

// Reverse-mode sweep from a scalar root. Populates .grad on every
// requires_grad node reachable from root, then clears the tape.
void backward(Tensor root);

}  // namespace lw::num
