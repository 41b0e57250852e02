#include "coarsekit/parallel.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace coarsekit {

namespace {
std::atomic<int> g_workers{1};
}

void set_worker_count(int jobs) { g_workers.store(jobs < 1 ? 1 : jobs); }
int worker_count() { return g_workers.load(); }

void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int jobs = worker_count();
    if (jobs <= 1 || n < 1024) {
        fn(0, n);
        return;
    }
    const std::size_t chunks = static_cast<std::size_t>(jobs);
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(chunks);
    for (std::size_t w = 0; w < chunks; ++w) {
        const std::size_t begin = n * w / chunks;
        const std::size_t end = n * (w + 1) / chunks;
        threads.emplace_back([&, w, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace coarsekit
