#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace jl::par {

// Thread cap from JL_THREADS; 0 or unset means hardware concurrency.
inline unsigned thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const char* env = std::getenv("JL_THREADS");
    if (env == nullptr || *env == '\0') return hw;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || v < 0) return hw;
    if (v == 0) return hw;
    return static_cast<unsigned>(v);
}

// Runs body(chunk_index, begin, end) over [0,n) split into fixed-size chunks.
// The chunk layout depends only on (n, chunk_size), never on the thread
// count, so per-chunk results reduced in chunk order are deterministic.
template <class Body>
void for_chunks(std::uint64_t n, std::uint64_t chunk_size, Body&& body) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::uint64_t n_chunks = (n + chunk_size - 1) / chunk_size;
    unsigned n_threads = thread_budget();
    if (n_threads > n_chunks) n_threads = static_cast<unsigned>(n_chunks);

    if (n_threads <= 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c)
            body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }

    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= n_chunks) return;
            body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

// Kahan compensated accumulator; keeps sample means order-insensitive up to
// the deterministic chunk layout.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

}
