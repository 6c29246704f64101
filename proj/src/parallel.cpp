#include "fmr/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fmr {

namespace {

std::atomic<int> g_thread_cap{0};

int env_thread_cap() {
    const char* s = std::getenv("FMR_THREADS");
    if (!s) return 0;
    int v = std::atoi(s);
    return v > 0 ? v : 0;
}

}  // namespace

void set_thread_cap(int n) { g_thread_cap.store(n > 0 ? n : 0); }

int thread_cap() {
    int cap = g_thread_cap.load();
    if (cap == 0) cap = env_thread_cap();
    if (cap == 0) cap = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(cap, 1);
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (count == 0) return;
    std::size_t workers = std::min<std::size_t>(thread_cap(), count);
    if (workers <= 1) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(begin + chunk, count);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace fmr
