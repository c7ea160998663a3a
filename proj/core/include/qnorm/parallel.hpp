// SPDX-License-Identifier: Apache-2.0
#ifndef QNORM_PARALLEL_HPP
#define QNORM_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace qnorm {

// Worker-thread cap. Resolution order: explicit set_thread_budget(), the
// QNORM_THREADS environment variable, hardware concurrency.
int thread_budget();
void set_thread_budget(int n);  // n <= 0 restores automatic resolution

// Runs body(i) for i in [0, n). Bodies must be index-independent; any
// randomness has to come from a seed derived from i (see derive_seed), which
// makes results identical for every thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qnorm

#endif  // QNORM_PARALLEL_HPP
