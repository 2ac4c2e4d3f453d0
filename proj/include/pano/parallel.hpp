#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace pano {

/// Runs fn(row) for every row in [0, rows). Work is split by row so results
/// are identical for any thread count; fn must only write state owned by its
/// row.
inline void parallel_rows(int rows, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || rows <= 1) {
        for (int y = 0; y < rows; ++y) fn(y);
        return;
    }
    threads = std::min(threads, rows);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (int y = t; y < rows; y += threads) fn(y);
        });
    }
    for (auto& th : pool) th.join();
}

/// Deterministic reduction: per-row partial sums combined in row order,
/// independent of the thread count.
inline double parallel_row_sum(int rows, int threads, const std::function<double(int)>& row_fn) {
    std::vector<double> partial(static_cast<size_t>(std::max(rows, 0)), 0.0);
    parallel_rows(rows, threads, [&](int y) { partial[y] = row_fn(y); });
    double total = 0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace pano
