// Minimal data-parallel loop over disjoint index ranges. Results are
// independent of the thread count because every worker writes only to its
// own slice of preallocated output.

#ifndef DEPTHRES_PARALLEL_HPP
#define DEPTHRES_PARALLEL_HPP

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace depthres {

/// Worker cap: DEPTHRES_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int max_threads();

/// Runs fn(i) for i in [begin, end), splitting the range into contiguous
/// chunks across worker threads. Small ranges run inline on the caller.
/// The first exception thrown by any worker is rethrown on the caller.
template <typename Fn>
void parallel_for(int begin, int end, Fn&& fn, int min_parallel_size = 2048) {
    const int n = end - begin;
    if (n <= 0) return;
    const int threads = std::min(max_threads(), (n + min_parallel_size - 1) / min_parallel_size);
    if (threads <= 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    pool.reserve(threads);
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = begin + t * chunk;
        const int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, t, &fn, &errors] {
            try {
                for (int i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace depthres

#endif  // DEPTHRES_PARALLEL_HPP
