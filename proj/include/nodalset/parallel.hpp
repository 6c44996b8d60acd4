#pragma once

#include <cstddef>
#include <functional>

namespace nodalset {

/// Worker count from NODALSET_WORKERS (default 1, clamped to [1, 64]).
int worker_count();

/// Runs body(i) for i in [0, n) on up to `workers` threads. Each index is
/// processed exactly once; results must be written to per-index slots so the
/// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

}  // namespace nodalset
