// SPDX-License-Identifier: Apache-2.0
#include "mgsa/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mgsa {

GradCheckResult check_gradients(ParamStore& ps, const std::function<double()>& loss_fn,
                                double eps, int samples_per_param, Rng& rng) {
  GradCheckResult res;
  for (int slot = 0; slot < ps.count(); ++slot) {
    Tensor& p = ps.value(slot);
    const Tensor& g = ps.grad(slot);
    const int n = static_cast<int>(p.v.size());

    std::vector<int> coords(static_cast<size_t>(n));
    std::iota(coords.begin(), coords.end(), 0);
    if (n > samples_per_param) {
      rng.shuffle(coords);
      coords.resize(static_cast<size_t>(samples_per_param));
      std::sort(coords.begin(), coords.end());
    }

    for (int c : coords) {
      const double saved = p.v[static_cast<size_t>(c)];
      p.v[static_cast<size_t>(c)] = saved + eps;
      const double up = loss_fn();
      p.v[static_cast<size_t>(c)] = saved - eps;
      const double down = loss_fn();
      p.v[static_cast<size_t>(c)] = saved;

      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = g.v[static_cast<size_t>(c)];
      const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      const double rel = std::fabs(analytic - numeric) / denom;
      ++res.coords_checked;
      if (rel > res.max_rel_err) {
        res.max_rel_err = rel;
        res.worst_param = ps.name(slot);
        res.worst_index = c;
        res.worst_analytic = analytic;
        res.worst_numeric = numeric;
      }
    }
  }
  return res;
}

}  // namespace mgsa
