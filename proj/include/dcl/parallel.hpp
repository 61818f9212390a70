#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace dcl {

/// Worker cap: DCL_THREADS if set (>=1), else hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("DCL_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

/// Runs fn(begin, end) over fixed-size chunks of [0, n). Chunk boundaries do not
/// depend on the worker count, so per-chunk results can be reduced in chunk order
/// to give bit-identical output for any DCL_THREADS value. fn must only touch
/// state owned by its chunk.
template <typename Fn>
void parallel_chunks(std::size_t n, std::size_t chunk, Fn&& fn) {
    if (n == 0) return;
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    const int workers = std::min<std::size_t>(worker_count(), n_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c * chunk, std::min(n, (c + 1) * chunk));
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = std::size_t(w); c < n_chunks; c += std::size_t(workers))
                fn(c * chunk, std::min(n, (c + 1) * chunk));
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace dcl
