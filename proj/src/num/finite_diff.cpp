#include "lw/num/finite_diff.hpp"

#include <cmath>
#include <stdexcept>

namespace lw::num {

GradList finite_diff_grad(const std::function<double(const ParamSet&)>& f, const ParamSet& params,
                          double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be positive");
  ParamSet work = params.clone(false);
  GradList out;
  for (std::size_t t = 0; t < work.values.size(); ++t) {
    auto& tensor = work.values[t];
    std::vector<double> g(tensor.size());
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double orig = tensor.data()[i];
      tensor.data()[i] = orig + h;
      const double fp = f(work);
      tensor.data()[i] = orig - h;
      const double fm = f(work);
      tensor.data()[i] = orig;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw std::runtime_error("finite_diff_grad: non-finite function evaluation");
      g[i] = (fp - fm) / (2.0 * h);
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace lw::num
