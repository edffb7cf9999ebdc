#include "cmlab/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace cmlab {

namespace {
std::atomic<int> g_workers{1};
}

int worker_count() { return g_workers.load(); }
void set_worker_count(int n) { g_workers.store(n < 1 ? 1 : n); }

void run_blocks(size_t nblocks, const std::function<void(size_t)>& task) {
    size_t w = static_cast<size_t>(worker_count());
    if (w > nblocks) w = nblocks;
    if (w <= 1) {
        for (size_t b = 0; b < nblocks; ++b) task(b);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto body = [&] {
        for (;;) {
            size_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            try {
                task(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                next.store(nblocks);
            }
        }
    };
    std::vector<std::thread> th;
    for (size_t i = 0; i + 1 < w; ++i) th.emplace_back(body);
    body();
    for (auto& t : th) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace cmlab
