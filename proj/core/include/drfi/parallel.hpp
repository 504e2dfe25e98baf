#pragma once

#include <cstddef>
#include <functional>

namespace drfi {

/// 0 means "all hardware threads"; anything else is clamped to >= 1.
int resolve_threads(int requested);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are
/// claimed dynamically; the first exception thrown is rethrown on the caller.
/// Results must not depend on scheduling, so callers write to per-index slots.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace drfi
