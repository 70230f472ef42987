#include "thinshell/threads.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace thinshell {

namespace {
std::atomic<int> g_workers{1};
}

void set_worker_threads(int n) {
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    g_workers = std::clamp(n, 1, std::max(1, hw));
}

int worker_threads() { return g_workers.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int workers = g_workers.load();
    if (workers <= 1 || n < 4096) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = std::min(n, w * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& t : pool)
        t.join();
}

} // namespace thinshell
