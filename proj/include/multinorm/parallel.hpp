#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace multinorm {

// Worker cap for the embarrassingly parallel per-scale loops.  Results are
// always written to caller-indexed slots and reduced in a fixed order, so the
// outputs do not depend on the worker count.
inline int& worker_cap() {
    static int cap = [] {
        if (const char* env = std::getenv("MULTINORM_JOBS")) {
            int v = std::atoi(env);
            if (v > 0) return v;
        }
        unsigned hc = std::thread::hardware_concurrency();
        return hc ? (int)hc : 1;
    }();
    return cap;
}

inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const int jobs = std::min<std::size_t>(std::max(1, worker_cap()), count);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace multinorm
