#pragma once

#include <exception>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "exsum/errors.hpp"
#include "exsum/strategies.hpp"

namespace exsum {

// Physical thread budget: min(requested, EXSUM_THREADS if set).  The rank
// count P is a semantic parameter -- results never depend on how many OS
// threads actually carry the ranks.
int thread_cap(int requested);

// Contiguous block partition of [0, n) into P ranks, block size ceil(n/P).
// Trailing ranks may be empty when P > n.
struct BlockPartition {
    long n;
    int P;

    long block_size() const { return (n + P - 1) / P; }

    std::pair<long, long> block(int rank) const {
        const long lo = std::min(static_cast<long>(rank) * block_size(), n);
        const long hi = std::min(lo + block_size(), n);
        return {lo, hi};
    }
};

// Run fn(rank) for rank = 0..P-1 and collect results indexed by rank.
// Ranks are interleaved over at most thread_cap(P) OS threads; with a cap of
// one everything runs inline on the caller.  If any rank throws, the
// exception from the lowest-numbered failing rank is rethrown after all
// ranks finish.
template <class F>
auto run_workers(int P, F&& fn) {
    using R = std::invoke_result_t<F&, int>;
    static_assert(!std::is_void_v<R>, "workers must return a value per rank");
    if (P < 1) throw InvalidConfig("rank count must be >= 1");

    std::vector<R> results(static_cast<std::size_t>(P));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(P));
    const int threads = thread_cap(P);

    auto lane = [&](int t) {
        for (int rank = t; rank < P; rank += threads) {
            try {
                results[static_cast<std::size_t>(rank)] = fn(rank);
            } catch (...) {
                errors[static_cast<std::size_t>(rank)] = std::current_exception();
            }
        }
    };

    if (threads <= 1) {
        lane(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads) - 1);
        for (int t = 1; t < threads; ++t) pool.emplace_back(lane, t);
        lane(0);
    }

    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
    return results;
}

namespace detail {

// Value core of parallel_sum, sequential: per-block strategy sums combined
// by plain addition in block order.  Hot per-element reductions (matmul
// cells) call this directly to get parallel_sum's value without nested
// thread spawns.
template <IeeeFloat T>
T chunked_sum_unchecked(std::span<const T> xs, int P, Strategy strategy) {
    const BlockPartition part{static_cast<long>(xs.size()), P};
    auto block_sum = [&](int rank) {
        const auto [lo, hi] = part.block(rank);
        return sum_unchecked(xs.subspan(static_cast<std::size_t>(lo),
                                        static_cast<std::size_t>(hi - lo)),
                             strategy);
    };
    T total = block_sum(0);
    for (int r = 1; r < P; ++r) total += block_sum(r);
    return total;
}

}  // namespace detail

// Deterministic parallel reduction: each rank reduces its block with the
// requested strategy, then the per-rank scalars are combined by plain
// addition in rank order.  A pure function of (xs, P, strategy); the block
// boundaries -- and therefore the roundings -- depend on P by design.
template <IeeeFloat T>
T parallel_sum(std::span<const T> xs, int P, Strategy strategy) {
    if (P < 1) throw InvalidConfig("rank count must be >= 1");
    validate_finite(xs);

    const BlockPartition part{static_cast<long>(xs.size()), P};
    auto locals = run_workers(P, [&](int rank) {
        const auto [lo, hi] = part.block(rank);
        return detail::sum_unchecked(xs.subspan(static_cast<std::size_t>(lo),
                                                static_cast<std::size_t>(hi - lo)),
                                     strategy);
    });

    T total = locals[0];
    for (std::size_t r = 1; r < locals.size(); ++r) total += locals[r];
    return total;
}

}  // namespace exsum
