#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace kmx {

/// Runs body(i) for i in [0, n). Outputs of different i must not alias:
/// every loop parallelized through here writes disjoint slots, so results
/// are bitwise identical for any thread count.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t lo = n * t / nt;
        const std::size_t hi = n * (t + 1) / nt;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace kmx
