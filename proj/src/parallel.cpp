#include "vrsverb/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>

namespace vrsverb {

namespace {
int g_default_jobs = 0;
}

int default_jobs() {
    if (g_default_jobs > 0) return g_default_jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 4;
}

void set_default_jobs(int jobs) { g_default_jobs = jobs; }

void parallel_for(int begin, int end, const std::function<void(int)>& body, int jobs) {
    const int n = end - begin;
    if (n <= 0) return;
    const int workers = std::max(1, std::min(jobs > 0 ? jobs : default_jobs(), n));
    if (workers == 1) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }
    std::atomic<int> next(begin);
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= end) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 0; t < workers - 1; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace vrsverb
