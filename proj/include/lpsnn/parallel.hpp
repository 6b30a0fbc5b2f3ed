#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace lpsnn {

// Runs fn(ctx, i) for i in [0, n). Each worker thread gets its own context
// from make_ctx(); with jobs <= 1 everything runs inline. Work items must
// write only to per-index slots (or thread-local state) so the result is
// independent of thread count and scheduling.
template <typename MakeCtx, typename Fn>
void parallel_for(std::size_t n, int jobs, MakeCtx&& make_ctx, Fn&& fn) {
    if (n == 0) return;
    const std::size_t workers =
        jobs <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    if (workers == 1) {
        auto ctx = make_ctx();
        for (std::size_t i = 0; i < n; ++i) fn(ctx, i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            auto ctx = make_ctx();
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                fn(ctx, i);
            }
        });
    }
    for (auto& t : threads) t.join();
}

inline int default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace lpsnn
