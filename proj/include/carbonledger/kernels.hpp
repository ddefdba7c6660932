#pragma once

// Index-parallel loop used by every batch and Monte Carlo kernel. Each
// index writes only its own output slot, so results do not depend on the
// execution mode or the thread count.

#include <cstddef>
#include <exception>
#include <mutex>
#include <utility>
#include <vector>

#include <omp.h>

namespace carbonledger {

enum class Execution { serial, parallel };

struct ExecutionPolicy {
    Execution mode = Execution::parallel;
    /// 0 leaves the OpenMP default in place.
    int threads = 0;

    static ExecutionPolicy serial() { return {Execution::serial, 1}; }
    static ExecutionPolicy parallel(int threads = 0) { return {Execution::parallel, threads}; }
};

namespace detail {

/// Serial reference loop.
template <class F>
void for_each_index_serial(std::size_t n, F&& f) {
    for (std::size_t i = 0; i < n; ++i) f(i);
}

template <class F>
void for_each_index_parallel(std::size_t n, int threads, F&& f) {
    std::exception_ptr failure;
    std::mutex mu;
    const auto count = static_cast<long long>(n);
    const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(team)
    for (long long i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

template <class F>
void for_each_index(std::size_t n, const ExecutionPolicy& policy, F&& f) {
    if (policy.mode == Execution::serial) {
        detail::for_each_index_serial(n, std::forward<F>(f));
    } else {
        detail::for_each_index_parallel(n, policy.threads, std::forward<F>(f));
    }
}

/// out[i] = f(i) for i in [0, n).
template <class F>
std::vector<double> sample_draws(std::size_t n, const ExecutionPolicy& policy, F&& f) {
    std::vector<double> out(n);
    for_each_index(n, policy, [&](std::size_t i) { out[i] = f(i); });
    return out;
}

}  // namespace carbonledger
