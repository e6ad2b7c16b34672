// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_THREADING_HPP_
#define MGSA_THREADING_HPP_

#include <functional>

namespace mgsa {

// Worker count: MGSA_THREADS if set (clamped to >= 1), else
// hardware_concurrency. Read once per call, so tests can override the env.
int worker_count();

// Runs fn(0..n-1). Each index must write only its own outputs; with that
// discipline results are identical for any worker count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace mgsa

#endif  // MGSA_THREADING_HPP_
