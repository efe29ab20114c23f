#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "common/random_graphs.hpp"
#include "lw/num/finite_diff.hpp"
#include "lw/num/tensor.hpp"

using namespace lw::num;

TEST_CASE("f(w)=w^2 at w=3 has gradient 6") {
  Tensor w = Tensor::scalar(3.0, true);
  Tensor y = mul(w, w);
  backward(y);
  CHECK(w.grad()[0] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("constant root leaves zero gradient") {
  Tensor w = Tensor::scalar(2.0, true);
  Tensor c = Tensor::scalar(5.0, true);
  Tensor y = mul(c, c);
  backward(y);
  // w never participates; its grad stays empty, c gets 10
  CHECK(w.grad().empty());
  CHECK(c.grad()[0] == doctest::Approx(10.0));

  // a root with no dependence on a participating leaf: f = sum(0 * w)
  Tensor w2 = Tensor::scalar(4.0, true);
  Tensor y2 = sum(scale(w2, 0.0));
  backward(y2);
  CHECK(w2.grad()[0] == 0.0);
}

TEST_CASE("backward rejects non-scalar roots") {
  Tensor w = Tensor::from_data({2}, {1.0, 2.0}, true);
  Tensor y = add(w, w);
  CHECK_THROWS(backward(y));
}

TEST_CASE("sum(tanh(W x)) gradient matches central differences") {
  PrngStream s(42, 0);
  ParamSet p;
  std::vector<double> wdata(12);
  for (auto& v : wdata) v = s.uniform(-1.0, 1.0);
  p.values.push_back(Tensor::from_data({4, 3}, std::move(wdata), true));

  std::vector<double> xdata(3);
  for (auto& v : xdata) v = s.uniform(-1.0, 1.0);
  const Tensor x = Tensor::from_data({1, 3}, xdata, false);

  auto f = [&x](const ParamSet& q) {
    return sum(tanh(matmul_nt(x, q.values[0]))).value();
  };

  Tensor root = sum(tanh(matmul_nt(x, p.values[0])));
  backward(root);
  GradList ad = collect_grads(p);
  GradList fd = finite_diff_grad(f, p, 1e-5);
  for (std::size_t i = 0; i < ad[0].size(); ++i) {
    const double denom = std::max({1.0, std::abs(ad[0][i]), std::abs(fd[0][i])});
    CHECK(std::abs(ad[0][i] - fd[0][i]) / denom < 1e-4);
  }
}

TEST_CASE("forward evaluation is pure") {
  PrngStream s(3, 1);
  std::vector<double> d(16);
  for (auto& v : d) v = s.uniform(-2.0, 2.0);
  Tensor a = Tensor::from_data({4, 4}, d, false);
  Tensor b = Tensor::from_data({4, 4}, d, false);
  Tensor r1 = sum(tanh(matmul(a, b)));
  Tensor r2 = sum(tanh(matmul(a, b)));
  CHECK(r1.value() == r2.value());
}

TEST_CASE("graph with shared subexpression accumulates both paths") {
  // y = w*w + w*w -> dy/dw = 4w
  Tensor w = Tensor::scalar(1.5, true);
  Tensor sq = mul(w, w);
  Tensor y = add(sq, sq);
  backward(y);
  CHECK(w.grad()[0] == doctest::Approx(6.0));
}

TEST_CASE("clamp gradient is pass-through inside the band only") {
  Tensor w = Tensor::from_data({3}, {-10.0, 0.5, 10.0}, true);
  Tensor y = sum(clamp(w, -8.0, 8.0));
  backward(y);
  CHECK(w.grad()[0] == 0.0);
  CHECK(w.grad()[1] == 1.0);
  CHECK(w.grad()[2] == 0.0);
}

TEST_CASE("slice_cols forwards values and scatters gradients") {
  Tensor a = Tensor::from_data({2, 4}, {1, 2, 3, 4, 5, 6, 7, 8}, true);
  Tensor s = slice_cols(a, 1, 2);
  CHECK(s.at(0, 0) == 2.0);
  CHECK(s.at(1, 1) == 7.0);
  backward(sum(s));
  CHECK(a.grad() == std::vector<double>{0, 1, 1, 0, 0, 1, 1, 0});
}

TEST_CASE("100 random graphs: backward matches finite differences under 1e-4") {
  PrngStream s(2026, 17);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto gc = lw::testing::random_graph(s);
    worst = std::max(worst, lw::testing::grad_check_error(gc));
  }
  CHECK(worst < 1e-4);
}
