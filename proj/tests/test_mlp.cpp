#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lw/num/mlp.hpp"

using namespace lw::num;

TEST_CASE("init_mlp [2,3]: weight 3x2, bias length 3, biases zero") {
  PrngStream s(1, 0);
  MlpSpec spec{{2, 3}};
  ParamSet p = init_mlp(spec, s);
  REQUIRE(p.values.size() == 2);
  CHECK(p.values[0].shape() == std::vector<int>{3, 2});
  CHECK(p.values[1].shape() == std::vector<int>{3});
  for (double b : p.values[1].data_vec()) CHECK(b == 0.0);
}

TEST_CASE("init_mlp is deterministic in (spec, seed)") {
  MlpSpec spec{{4, 8, 2}};
  PrngStream s1(99, 3), s2(99, 3);
  ParamSet a = init_mlp(spec, s1);
  ParamSet b = init_mlp(spec, s2);
  for (std::size_t t = 0; t < a.values.size(); ++t)
    CHECK(a.values[t].data_vec() == b.values[t].data_vec());
}

TEST_CASE("init_mlp [4,64,64,8]: per-matrix bound and near-zero mean") {
  PrngStream s(7, 0);
  MlpSpec spec{{4, 64, 64, 8}};
  ParamSet p = init_mlp(spec, s);
  for (int l = 0; l < spec.n_layers(); ++l) {
    const double a = std::sqrt(6.0 / (spec.layer_widths[l] + spec.layer_widths[l + 1]));
    const auto& w = p.values[2 * l].data_vec();
    double mean = 0.0, mx = 0.0;
    for (double v : w) {
      mean += v;
      mx = std::max(mx, std::abs(v));
    }
    mean /= static_cast<double>(w.size());
    CHECK(std::abs(mean) <= 0.05);
    CHECK(mx <= a);
  }
}

TEST_CASE("init_mlp rejects zero widths") {
  PrngStream s(1, 0);
  MlpSpec bad{{2, 0, 3}};
  CHECK_THROWS(init_mlp(bad, s));
}

TEST_CASE("mlp_forward: zero params give zero output") {
  MlpSpec spec{{3, 5, 2}};
  ParamSet p;
  p.values.push_back(Tensor::zeros({5, 3}, true));
  p.values.push_back(Tensor::zeros({5}, true));
  p.values.push_back(Tensor::zeros({2, 5}, true));
  p.values.push_back(Tensor::zeros({2}, true));
  Tensor x = Tensor::from_data({2, 3}, {1, -2, 3, 0.5, 0.25, -1}, false);
  Tensor y = mlp_forward(p, spec, x);
  for (double v : y.data_vec()) CHECK(v == 0.0);
}

TEST_CASE("mlp_forward: identity single linear layer returns the input") {
  MlpSpec spec{{3, 3}};
  ParamSet p;
  p.values.push_back(Tensor::from_data({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1}, true));
  p.values.push_back(Tensor::zeros({3}, true));
  Tensor x = Tensor::from_data({2, 3}, {1, 2, 3, -4, 5, -6}, false);
  Tensor y = mlp_forward(p, spec, x);
  CHECK(y.data_vec() == x.data_vec());
}

TEST_CASE("mlp_forward matches a straight-line re-evaluation to 1e-12") {
  PrngStream s(404, 2);
  MlpSpec spec{{2, 8, 1}};
  ParamSet p = init_mlp(spec, s);

  std::vector<double> x{0.3, -0.7};
  Tensor xb = Tensor::from_data({1, 2}, x, false);
  Tensor y = mlp_forward(p, spec, xb);

  // independent arithmetic: hidden_j = tanh(sum_i W0[j,i] x_i + b0_j)
  const auto& w0 = p.values[0].data_vec();
  const auto& b0 = p.values[1].data_vec();
  const auto& w1 = p.values[2].data_vec();
  const auto& b1 = p.values[3].data_vec();
  double out = b1[0];
  for (int j = 0; j < 8; ++j) {
    double h = b0[j];
    for (int i = 0; i < 2; ++i) h += w0[static_cast<std::size_t>(j) * 2 + i] * x[i];
    out += w1[j] * std::tanh(h);
  }
  CHECK(std::abs(y.value() - out) < 1e-12);
}

TEST_CASE("mlp_forward rejects shape mismatch") {
  PrngStream s(1, 0);
  MlpSpec spec{{3, 4}};
  ParamSet p = init_mlp(spec, s);
  Tensor x = Tensor::from_data({2, 2}, {1, 2, 3, 4}, false);
  CHECK_THROWS(mlp_forward(p, spec, x));
}

TEST_CASE("MlpFn matches the tape path bit for bit") {
  PrngStream s(5150, 1);
  MlpSpec spec{{3, 16, 16, 4}};
  ParamSet p = init_mlp(spec, s);
  MlpFn fn(p, spec);

  std::vector<double> x{0.1, -0.2, 0.9};
  Tensor xb = Tensor::from_data({1, 3}, x, false);
  Tensor y = mlp_forward(p, spec, xb);
  std::vector<double> z = fn(x);
  for (int j = 0; j < 4; ++j) CHECK(y.data()[j] == z[j]);
}
