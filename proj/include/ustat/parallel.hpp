#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace ustat {

inline int effective_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count) over a static contiguous partition. fn must
// only touch state owned by index i; aggregation stays with the caller, so
// results cannot depend on the worker count or on scheduling.
inline void parallel_for_index(std::uint64_t count, int workers,
                               const std::function<void(std::uint64_t)>& fn) {
    const std::uint64_t threads =
        std::min<std::uint64_t>(static_cast<std::uint64_t>(effective_workers(workers)),
                                count == 0 ? 1 : count);
    if (threads <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::uint64_t w = 0; w < threads; ++w) {
        const std::uint64_t lo = count * w / threads;
        const std::uint64_t hi = count * (w + 1) / threads;
        pool.emplace_back([&, w, lo, hi] {
            try {
                for (std::uint64_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace ustat
