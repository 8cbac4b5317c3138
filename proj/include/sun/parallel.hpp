#pragma once

#include <functional>

namespace sun {

/// Runs fn(chunk) for chunk in [0, n_chunks) on up to `threads` workers.
/// The chunk decomposition is fixed by the caller and each chunk must write
/// only to its own output slot; reductions happen afterwards in chunk order,
/// so results do not depend on the thread count.
void run_chunks(int n_chunks, int threads, const std::function<void(int)>& fn);

}  // namespace sun
