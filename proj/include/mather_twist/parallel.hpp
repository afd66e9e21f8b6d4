#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace mather_twist {

/// Worker count: hardware concurrency, capped by MATHER_TWIST_THREADS when set.
unsigned worker_count();

/// Runs fn(i) for i in [0, n). Nested calls run serially on the calling thread.
/// The exception thrown by the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Counter-based generator: deterministic per (seed, stream), independent of
/// scheduling.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next();
    /// Uniform in [-1, 1).
    double symmetric();

private:
    std::uint64_t state_;
};

}  // namespace mather_twist
