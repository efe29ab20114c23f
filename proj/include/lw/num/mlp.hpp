#pragma once

#include <vector>

#include "lw/num/prng.hpp"
#include "lw/num/tensor.hpp"

namespace lw::num {

enum class Activation { kTanh, kRelu };

// Layer widths, input first, output last; hidden layers get the activation,
// the final layer is linear.
struct MlpSpec {
  std::vector<int> layer_widths;
  Activation activation = Activation::kTanh;

  int in_width() const { return layer_widths.front(); }
  int out_width() const { return layer_widths.back(); }
  int n_layers() const { return static_cast<int>(layer_widths.size()) - 1; }
  void validate() const;
  std::size_t param_count() const;
};

// Ordered [W0, b0, W1, b1, ...]; W_l has shape (out, in), b_l shape (out).
struct ParamSet {
  std::vector<Tensor> values;

  ParamSet clone(bool requires_grad) const;
  std::size_t count() const;
  void set_requires_grad(bool v);
};

// Glorot-uniform weights, zero biases; deterministic in (spec, stream).
ParamSet init_mlp(const MlpSpec& spec, PrngStream& stream);

// Tape-recording forward pass; batch is (n, in_width).
Tensor mlp_forward(const ParamSet& params, const MlpSpec& spec, const Tensor& batch);

// Tape-free evaluator over plain buffers; snapshot of a ParamSet. Uses the
// same per-element accumulation order as the tape path, so values match
// bit-for-bit.
class MlpFn {
 public:
  MlpFn() = default;
  MlpFn(const ParamSet& params, const MlpSpec& spec);

  int in_width() const { return spec_.in_width(); }
  int out_width() const { return spec_.out_width(); }
  const MlpSpec& spec() const { return spec_; }

  std::vector<double> operator()(const std::vector<double>& in) const;
  void eval(const double* in, double* out) const;

 private:
  MlpSpec spec_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> biases_;
};

}  // namespace lw::num
