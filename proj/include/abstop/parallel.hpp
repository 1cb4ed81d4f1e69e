#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace abstop {

/// Worker count: ABSTOP_THREADS when set to a positive integer, else the hardware concurrency.
[[nodiscard]] inline unsigned worker_count() {
    if (const char* env = std::getenv("ABSTOP_THREADS")) {
        try {
            const long requested = std::stol(env);
            if (requested > 0) {
                return static_cast<unsigned>(requested);
            }
        } catch (const std::exception&) {
            // fall through to auto
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) over `workers` threads in contiguous blocks.
/// fn must not throw; results are written by index, so output order never
/// depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    const std::size_t block = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * block;
        const std::size_t end = std::min(n, begin + block);
        if (begin >= end) {
            break;
        }
        threads.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) {
                fn(i);
            }
        });
    }
}

} // namespace abstop
