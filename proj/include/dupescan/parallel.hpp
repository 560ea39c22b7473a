#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dupescan {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Runs fn(begin, end) over static chunks of [0, n). Each index must be
/// processed independently (writes go to preallocated slots), which makes the
/// result identical for every thread count.
template <typename Fn>
void parallel_for(size_t n, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n < 2 * threads) {
        fn(size_t{0}, n);
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(threads);
    size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        size_t begin = static_cast<size_t>(t) * chunk;
        size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&, t, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace dupescan
