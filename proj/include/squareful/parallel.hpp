#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace squareful {

/// Environment variable overriding the default worker count.
inline constexpr const char* threads_env_var = "SQFUL_THREADS";

inline unsigned default_threads()
{
    if (const char* env = std::getenv(threads_env_var)) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Evaluates fn(i) for i in [0, n) on up to `threads` workers and returns the
/// results indexed by task. Tasks are claimed dynamically but results land in
/// task order, so any reduction over the returned vector is independent of the
/// thread count. The first exception thrown by a task is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, unsigned threads, Fn&& fn)
{
    using R = decltype(fn(std::size_t{0}));
    std::vector<R> out(n);
    const unsigned workers = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

} // namespace squareful

namespace squareful {

/// Thread-safe memo table. The value is computed outside the lock, so two
/// threads may race to fill the same key; both compute the same value.
template <class Key, class Value>
class Memo {
public:
    template <class Fn>
    Value get(const Key& key, Fn&& fn)
    {
        {
            std::lock_guard lock(mutex_);
            if (auto it = table_.find(key); it != table_.end()) return it->second;
        }
        Value v = fn();
        std::lock_guard lock(mutex_);
        return table_.emplace(key, std::move(v)).first->second;
    }

private:
    std::mutex mutex_;
    std::map<Key, Value> table_;
};

} // namespace squareful
