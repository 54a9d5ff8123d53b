// SPDX-License-Identifier: Apache-2.0

#include "pace/mc.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace pace::mc {

double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

namespace detail {

void run_batches(long n_batches, int threads, const std::function<void(long)>& body) {
    if (threads < 1) threads = 1;
    const int n_workers = static_cast<int>(std::min<long>(threads, n_batches));
    if (n_workers <= 1) {
        for (long b = 0; b < n_batches; ++b) body(b);
        return;
    }
    std::atomic<long> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto worker = [&] {
        for (;;) {
            const long b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_batches) return;
            try {
                body(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace detail

} // namespace pace::mc
