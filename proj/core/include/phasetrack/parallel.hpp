// Minimal worker pool for independent sweep points and replicas.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace phasetrack {

/**
 * Calls fn(i) for i in [0, count) on up to @p workers threads (0 = hardware
 * concurrency). Results must be written by index so the outcome does not
 * depend on scheduling. The first exception thrown is rethrown here.
 */
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned workers = 0) {
    if (count == 0) return;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace phasetrack
