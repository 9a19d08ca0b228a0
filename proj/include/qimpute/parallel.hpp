#pragma once

#include <cstddef>
#include <functional>

namespace qimpute {

// Splits [0, n) into contiguous chunks and runs body(begin, end) on up to
// `threads` workers. Chunk boundaries depend only on n and threads, and each
// index is processed by exactly one call, so results written per index are
// schedule independent. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

} // namespace qimpute
