#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace snowflake {

/// Resolves a requested worker count: 0 means "use hardware concurrency".
inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(chunk_index) for chunk_index in [0, num_chunks) on `workers`
/// threads. Chunks are handed out by an atomic counter; each chunk must
/// produce the same result regardless of which thread runs it.
inline void parallel_chunks(std::size_t num_chunks, int workers,
                            const std::function<void(std::size_t)>& fn) {
    workers = resolve_workers(workers);
    if (workers <= 1 || num_chunks <= 1) {
        for (std::size_t c = 0; c < num_chunks; ++c) fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto pump = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= num_chunks) break;
            fn(c);
        }
    };
    std::vector<std::thread> pool;
    int nthreads = static_cast<int>(std::min<std::size_t>(workers, num_chunks));
    pool.reserve(nthreads - 1);
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(pump);
    pump();
    for (auto& th : pool) th.join();
}

/// Deterministic pairwise (tree) reduction. The result depends only on the
/// order of `values`, never on thread scheduling.
inline double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Splits `total` items into fixed-size chunks (the chunk grid is a function
/// of `total` alone, so reductions are reproducible for any worker count).
struct ChunkGrid {
    std::size_t total;
    std::size_t chunk;

    explicit ChunkGrid(std::size_t total_items, std::size_t chunk_size = 4096)
        : total(total_items), chunk(chunk_size) {}

    std::size_t num_chunks() const { return total == 0 ? 0 : (total + chunk - 1) / chunk; }
    std::size_t begin(std::size_t c) const { return c * chunk; }
    std::size_t end(std::size_t c) const { return std::min(total, (c + 1) * chunk); }
};

/// Chunked deterministic map-reduce: per-chunk sums are accumulated
/// sequentially inside the chunk, then tree-reduced in chunk order.
inline double parallel_sum(std::size_t total, int workers,
                           const std::function<double(std::size_t, std::size_t)>& chunk_sum,
                           std::size_t chunk_size = 4096) {
    ChunkGrid grid(total, chunk_size);
    std::vector<double> partial(grid.num_chunks(), 0.0);
    parallel_chunks(grid.num_chunks(), workers, [&](std::size_t c) {
        partial[c] = chunk_sum(grid.begin(c), grid.end(c));
    });
    return pairwise_sum(partial);
}

}  // namespace snowflake
