#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "orbitchaos/core/random.hpp"

namespace orbitchaos {

/// Samples per batch. Fixed so batch boundaries never depend on the machine.
inline constexpr std::uint64_t kBatchSize = 8192;

/// Worker count used by run_batched; 0 means std::thread::hardware_concurrency().
void set_worker_count(unsigned workers) noexcept;
unsigned worker_count() noexcept;

/// Runs `per_sample(stream, acc)` for samples 0..n_samples-1, where `stream`
/// is the per-sample stream of `master_seed`. Samples are grouped into batches
/// of kBatchSize that run on independent workers; the per-batch accumulators
/// are merged in batch order, so the result is bit-identical for any worker
/// count. `Acc` needs a default constructor and `merge(const Acc&)`.
template <class Acc, class PerSample>
Acc run_batched(std::uint64_t n_samples, std::uint64_t master_seed, PerSample&& per_sample,
                std::uint64_t* batch_count = nullptr) {
    const std::uint64_t batches = (n_samples + kBatchSize - 1) / kBatchSize;
    if (batch_count != nullptr) *batch_count = batches;
    std::vector<Acc> partial(batches);

    auto run_batch = [&](std::uint64_t b) {
        const std::uint64_t first = b * kBatchSize;
        const std::uint64_t last = std::min(n_samples, first + kBatchSize);
        Acc& acc = partial[b];
        for (std::uint64_t i = first; i < last; ++i) {
            SampleStream stream = sample_stream(master_seed, i);
            per_sample(stream, acc);
        }
    };

    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), batches));
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < batches; ++b) run_batch(b);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::exception_ptr> failures(workers);
        {
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::uint64_t b = next++; b < batches; b = next++) run_batch(b);
                    } catch (...) {
                        failures[w] = std::current_exception();
                        next = batches;
                    }
                });
            }
        }
        for (const auto& f : failures) {
            if (f) std::rethrow_exception(f);
        }
    }

    Acc total;
    for (const Acc& acc : partial) total.merge(acc);
    return total;
}

}  // namespace orbitchaos
