#pragma once

// Random computation-graph generator for gradient checking. A plan is a pure
// recipe (leaf shapes + op steps) so the same graph can be re-evaluated at
// perturbed parameters by the finite-difference oracle. Generation is
// value-aware: exp is only applied where the operand stays small, log where
// it is safely positive, and relu where no operand sits on the kink, so the
// central-difference oracle is meaningful at h=1e-5.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lw/num/finite_diff.hpp"
#include "lw/num/mlp.hpp"
#include "lw/num/prng.hpp"
#include "lw/num/tensor.hpp"

namespace lw::testing {

struct GraphStep {
  enum Kind { kAdd, kMul, kMatmul, kTanh, kRelu, kExp, kLog, kSum, kMean };
  Kind kind;
  int a = -1;
  int b = -1;
};

struct GraphPlan {
  std::vector<std::vector<int>> leaf_shapes;
  std::vector<GraphStep> steps;
};

// Evaluates the plan on the given leaves; returns the scalar root tensor.
inline num::Tensor eval_plan(const GraphPlan& plan, const num::ParamSet& leaves) {
  std::vector<num::Tensor> pool;
  for (const auto& t : leaves.values) pool.push_back(t);
  for (const auto& s : plan.steps) {
    const num::Tensor& a = pool[s.a];
    switch (s.kind) {
      case GraphStep::kAdd: pool.push_back(num::add(a, pool[s.b])); break;
      case GraphStep::kMul: pool.push_back(num::mul(a, pool[s.b])); break;
      case GraphStep::kMatmul: pool.push_back(num::matmul(a, pool[s.b])); break;
      case GraphStep::kTanh: pool.push_back(num::tanh(a)); break;
      case GraphStep::kRelu: pool.push_back(num::relu(a)); break;
      case GraphStep::kExp: pool.push_back(num::exp(a)); break;
      case GraphStep::kLog: pool.push_back(num::log(a)); break;
      case GraphStep::kSum: pool.push_back(num::sum(a)); break;
      case GraphStep::kMean: pool.push_back(num::mean(a)); break;
    }
  }
  num::Tensor root = pool.back();
  if (root.size() != 1) throw std::logic_error("plan did not end in a scalar");
  return root;
}

struct GraphCase {
  GraphPlan plan;
  num::ParamSet leaves;
};

inline GraphCase random_graph(num::PrngStream& stream) {
  GraphCase gc;
  auto rand_dim = [&] { return 1 + static_cast<int>(stream.next_below(8)); };

  // start with 2-4 leaves
  const int n_leaves = 2 + static_cast<int>(stream.next_below(3));
  std::vector<std::vector<int>> shapes;
  for (int i = 0; i < n_leaves; ++i) {
    std::vector<int> shape{rand_dim(), rand_dim()};
    gc.plan.leaf_shapes.push_back(shape);
    shapes.push_back(shape);
    std::size_t sz = static_cast<std::size_t>(shape[0]) * shape[1];
    std::vector<double> data(sz);
    for (auto& v : data) v = stream.uniform(-1.0, 1.0);
    gc.leaves.values.push_back(num::Tensor::from_data(shape, std::move(data), true));
  }

  // evaluate as we build so op choices can inspect live values
  std::vector<num::Tensor> pool;
  for (const auto& t : gc.leaves.values) pool.push_back(t);

  auto minmax_abs = [&](int idx, double& mn_abs, double& mx, double& mn) {
    mn_abs = 1e300;
    mx = -1e300;
    mn = 1e300;
    for (double v : pool[idx].data_vec()) {
      const double a = v < 0 ? -v : v;
      if (a < mn_abs) mn_abs = a;
      if (v > mx) mx = v;
      if (v < mn) mn = v;
    }
  };

  const int depth = 2 + static_cast<int>(stream.next_below(3));
  for (int d = 0; d < depth; ++d) {
    const int pick = static_cast<int>(stream.next_below(7));
    const int ia = static_cast<int>(stream.next_below(pool.size()));
    double mn_abs, mx, mn;
    minmax_abs(ia, mn_abs, mx, mn);

    GraphStep step;
    step.a = ia;
    switch (pick) {
      case 0: {  // add: needs a same-shape partner
        step.kind = GraphStep::kAdd;
        int ib = -1;
        for (std::size_t j = 0; j < pool.size(); ++j)
          if (static_cast<int>(j) != ia && pool[j].shape() == pool[ia].shape()) ib = static_cast<int>(j);
        if (ib < 0) { step.kind = GraphStep::kTanh; break; }
        step.b = ib;
        break;
      }
      case 1: {  // mul
        step.kind = GraphStep::kMul;
        int ib = -1;
        for (std::size_t j = 0; j < pool.size(); ++j)
          if (static_cast<int>(j) != ia && pool[j].shape() == pool[ia].shape()) ib = static_cast<int>(j);
        if (ib < 0) { step.kind = GraphStep::kTanh; break; }
        step.b = ib;
        break;
      }
      case 2: {  // matmul: fabricate a compatible right operand leaf
        step.kind = GraphStep::kMatmul;
        const int k = pool[ia].shape()[1];
        std::vector<int> shape{k, rand_dim()};
        std::vector<double> data(static_cast<std::size_t>(shape[0]) * shape[1]);
        for (auto& v : data) v = stream.uniform(-1.0, 1.0);
        gc.plan.leaf_shapes.push_back(shape);
        gc.leaves.values.push_back(num::Tensor::from_data(shape, std::move(data), true));
        // leaves precede step outputs in the pool, so adding a leaf shifts
        // every step-output index up by one
        if (ia >= static_cast<int>(gc.leaves.values.size()) - 1) step.a = ia + 1;
        step.b = static_cast<int>(gc.leaves.values.size()) - 1;
        // re-index earlier steps' operands
        for (auto& s : gc.plan.steps) {
          if (s.a >= static_cast<int>(gc.leaves.values.size()) - 1) s.a += 1;
          if (s.b >= static_cast<int>(gc.leaves.values.size()) - 1) s.b += 1;
        }
        break;
      }
      case 3:
        step.kind = GraphStep::kTanh;
        break;
      case 4:  // relu, unless an operand entry sits within 1e-3 of the kink
        step.kind = (mn_abs > 1e-3) ? GraphStep::kRelu : GraphStep::kTanh;
        break;
      case 5:  // exp, unless it would blow past e^8
        step.kind = (mx < 8.0 && mn > -8.0) ? GraphStep::kExp : GraphStep::kTanh;
        break;
      case 6:  // log needs a safely positive operand
        step.kind = (mn > 0.1) ? GraphStep::kLog : GraphStep::kTanh;
        break;
    }
    gc.plan.steps.push_back(step);

    // extend the live pool to mirror eval_plan
    std::vector<num::Tensor> replay;
    for (const auto& t : gc.leaves.values) replay.push_back(t);
    for (const auto& s : gc.plan.steps) {
      const num::Tensor& a = replay[s.a];
      switch (s.kind) {
        case GraphStep::kAdd: replay.push_back(num::add(a, replay[s.b])); break;
        case GraphStep::kMul: replay.push_back(num::mul(a, replay[s.b])); break;
        case GraphStep::kMatmul: replay.push_back(num::matmul(a, replay[s.b])); break;
        case GraphStep::kTanh: replay.push_back(num::tanh(a)); break;
        case GraphStep::kRelu: replay.push_back(num::relu(a)); break;
        case GraphStep::kExp: replay.push_back(num::exp(a)); break;
        case GraphStep::kLog: replay.push_back(num::log(a)); break;
        case GraphStep::kSum: replay.push_back(num::sum(a)); break;
        case GraphStep::kMean: replay.push_back(num::mean(a)); break;
      }
    }
    pool = std::move(replay);
  }

  // scalarize
  GraphStep last;
  last.a = static_cast<int>(pool.size()) - 1;
  last.kind = stream.next_below(2) == 0 ? GraphStep::kSum : GraphStep::kMean;
  gc.plan.steps.push_back(last);
  return gc;
}

// max mixed abs/rel error between autodiff and central differences
inline double grad_check_error(const GraphCase& gc, double h = 1e-5) {
  num::ParamSet leaves = gc.leaves.clone(true);
  num::Tensor root = eval_plan(gc.plan, leaves);
  num::backward(root);
  // leaves outside the root's subgraph have zero gradient
  num::GradList ad;
  for (const auto& t : leaves.values)
    ad.push_back(t.grad().size() == t.size() ? t.grad() : std::vector<double>(t.size(), 0.0));

  auto f = [&gc](const num::ParamSet& p) { return eval_plan(gc.plan, p).value(); };
  num::GradList fd = num::finite_diff_grad(f, leaves, h);

  double worst = 0.0;
  for (std::size_t t = 0; t < ad.size(); ++t)
    for (std::size_t i = 0; i < ad[t].size(); ++i) {
      const double a = ad[t][i], b = fd[t][i];
      const double denom = std::max({1.0, std::abs(a), std::abs(b)});
      worst = std::max(worst, std::abs(a - b) / denom);
    }
  return worst;
}

}  // namespace lw::testing
