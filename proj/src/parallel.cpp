#include "tspmdf/parallel.hpp"

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tspmdf {

int default_thread_count() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (threads < 1) threads = 1;
    std::size_t workers = std::min<std::size_t>(threads, count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tspmdf
