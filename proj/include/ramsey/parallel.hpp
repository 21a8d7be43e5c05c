#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ramsey {

/// Runs body(worker, index) for every index in [0, count) on `workers`
/// threads pulling indices in chunks. The first exception thrown by any
/// worker is rethrown on the caller's thread.
template <typename Body>
void parallelFor(std::size_t count, int workers, Body&& body, std::size_t chunk = 64) {
    workers = std::max(1, workers);
    if (workers == 1 || count <= chunk) {
        for (std::size_t i = 0; i < count; ++i) body(0, i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failureMutex;
    std::atomic<bool> stop{false};
    auto run = [&](int worker) {
        try {
            while (!stop.load(std::memory_order_relaxed)) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= count) break;
                const std::size_t end = std::min(count, begin + chunk);
                for (std::size_t i = begin; i < end; ++i) body(worker, i);
            }
        } catch (...) {
            std::lock_guard lock(failureMutex);
            if (!failure) failure = std::current_exception();
            stop = true;
        }
    };
    std::vector<std::thread> threads;
    for (int w = 1; w < workers; ++w) threads.emplace_back(run, w);
    run(0);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

inline int defaultWorkers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace ramsey
