#pragma once

#include <functional>

namespace tvsar {

/// Runs body(i) for i in [0, n). With workers > 1 the iterations are spread
/// over that many threads; bodies must not share mutable state except through
/// per-index slots. If any body throws, the exception with the smallest index
/// is rethrown after all workers have stopped, so failure reporting does not
/// depend on scheduling.
void parallel_for(int n, int workers, const std::function<void(int)>& body);

/// Worker count resolution: explicit request wins, otherwise the TVSAR_WORKERS
/// environment variable, otherwise 1.
int resolve_workers(int requested);

}  // namespace tvsar
