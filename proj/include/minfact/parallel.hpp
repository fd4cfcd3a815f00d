#pragma once

#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>
#include <vector>

namespace minfact {

// Runs task(0), ..., task(n_tasks-1) on up to `workers` threads and returns
// the results indexed by task. The task partition and the merge order are
// fixed by the task index alone, never by the worker count or scheduling, so
// downstream aggregation is reproducible.
template <typename Result, typename TaskFn>
std::vector<Result> run_indexed_tasks(int n_tasks, int workers, TaskFn task) {
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    std::vector<Result> results(n_tasks);
    if (n_tasks == 0) return results;
    if (workers == 1 || n_tasks == 1) {
        for (int i = 0; i < n_tasks; ++i) results[i] = task(i);
        return results;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto body = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_tasks || failed.load()) return;
            try {
                results[i] = task(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min(workers, n_tasks);
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
    return results;
}

} // namespace minfact
