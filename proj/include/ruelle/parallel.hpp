#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ruelle {

// Worker count is process-global, settable from the CLI (--threads).
inline int& worker_count_ref() {
    static int count = static_cast<int>(std::thread::hardware_concurrency());
    return count;
}

inline int worker_count() {
    int c = worker_count_ref();
    return c > 0 ? c : 1;
}

inline void set_worker_count(int c) { worker_count_ref() = c > 0 ? c : 1; }

// Runs fn(begin, end) over disjoint chunks of [0, n). Results must be written
// to disjoint slots; reductions happen serially afterwards so that the output
// is identical for any worker count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    int workers = worker_count();
    if (workers <= 1 || n < 4096) {
        fn(0, n);
        return;
    }
    std::size_t chunk = (n + workers - 1) / static_cast<std::size_t>(workers);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::size_t begin = 0; begin < n; begin += chunk) {
        std::size_t end = begin + chunk < n ? begin + chunk : n;
        pool.emplace_back(fn, begin, end);
    }
    for (auto& t : pool) t.join();
}

// Deterministic pairwise summation: fixed recursion tree, independent of
// worker count and chunking.
inline double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

// Materialize fn(i) for i in [0, n) in parallel, then reduce serially.
template <typename Fn>
double parallel_map_sum(std::size_t n, Fn&& fn) {
    std::vector<double> slots(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) slots[i] = fn(i);
    });
    return pairwise_sum(slots);
}

}  // namespace ruelle
