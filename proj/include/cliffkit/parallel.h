//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_PARALLEL_H_
#define CLIFFKIT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace cliffkit {

// Worker cap: CLIFFKIT_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, n) across worker_count() threads. Callers write
// results into pre-sized slots so the outcome does not depend on scheduling.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

} // namespace cliffkit

#endif // CLIFFKIT_PARALLEL_H_
