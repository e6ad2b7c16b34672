// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_GRAD_CHECK_HPP_
#define MGSA_GRAD_CHECK_HPP_

#include <functional>
#include <string>

#include "mgsa/param_store.hpp"
#include "mgsa/rng.hpp"

namespace mgsa {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  int worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  long coords_checked = 0;
};

// Compares the analytic gradients already accumulated in `ps` against central
// differences of `loss_fn`, which must recompute the forward loss from the
// store's current parameter values. For each parameter up to
// `samples_per_param` coordinates are probed (all of them when the parameter
// is smaller); the relative error of a coordinate is
// |a - n| / max(|a|, |n|, 1e-8).
GradCheckResult check_gradients(ParamStore& ps, const std::function<double()>& loss_fn,
                                double eps, int samples_per_param, Rng& rng);

}  // namespace mgsa

#endif  // MGSA_GRAD_CHECK_HPP_
