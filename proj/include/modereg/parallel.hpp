#pragma once

#include <cstddef>
#include <functional>

namespace modereg {

//! Worker count used when a caller passes 0: MODEREG_THREADS if set and
//! positive, else the hardware concurrency (at least 1).
int default_threads();

//! Calls fn(i) for i in [0, count) on up to `threads` workers (0 = default).
//! Results must be written to per-index slots; the first exception thrown by
//! any call is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

}  // namespace modereg
