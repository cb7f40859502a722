// parallel.hpp — minimal fork/join over independent indices.

#pragma once

#include <functional>
#include <optional>

namespace lioueps {

/// Thread count from an explicit request, else LIOUEPS_THREADS, else 1.
int resolve_threads(std::optional<int> requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Exceptions are
/// rethrown on the calling thread (the one from the lowest index wins).
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace lioueps
