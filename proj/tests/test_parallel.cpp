#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "exsum/parallel.hpp"

using namespace exsum;

namespace {
template <class T>
std::span<const T> sp(const std::vector<T>& v) {
    return std::span<const T>(v);
}

struct ThreadCapGuard {
    explicit ThreadCapGuard(const char* v) { setenv("EXSUM_THREADS", v, 1); }
    ~ThreadCapGuard() { unsetenv("EXSUM_THREADS"); }
};
}  // namespace

TEST_CASE("block partition covers the range without overlap") {
    for (long n : {0L, 1L, 7L, 64L, 65L, 1000L}) {
        for (int P : {1, 2, 3, 8, 70}) {
            BlockPartition part{n, P};
            long covered = 0;
            long prev_hi = 0;
            for (int r = 0; r < P; ++r) {
                auto [lo, hi] = part.block(r);
                CHECK(lo == prev_hi);
                CHECK(lo <= hi);
                CHECK(hi <= n);
                covered += hi - lo;
                prev_hi = hi;
            }
            CHECK(covered == n);
        }
    }
}

TEST_CASE("block partition edge shapes") {
    BlockPartition part{10, 4};  // ceil = 3: blocks 3,3,3,1
    CHECK(part.block_size() == 3);
    CHECK(part.block(0) == std::pair<long, long>{0, 3});
    CHECK(part.block(3) == std::pair<long, long>{9, 10});

    BlockPartition tall{2, 8};  // more ranks than elements
    CHECK(tall.block(0) == std::pair<long, long>{0, 1});
    CHECK(tall.block(1) == std::pair<long, long>{1, 2});
    for (int r = 2; r < 8; ++r) {
        auto [lo, hi] = tall.block(r);
        CHECK(lo == hi);  // trailing empties
    }
}

TEST_CASE("run_workers indexes results by rank") {
    auto results = run_workers(7, [](int rank) { return rank * rank; });
    REQUIRE(results.size() == 7);
    for (int r = 0; r < 7; ++r) CHECK(results[r] == r * r);
}

TEST_CASE("run_workers rejects non-positive rank counts") {
    CHECK_THROWS_AS(run_workers(0, [](int) { return 0; }), InvalidConfig);
    CHECK_THROWS_AS(run_workers(-3, [](int) { return 0; }), InvalidConfig);
}

TEST_CASE("run_workers rethrows the lowest-numbered failing rank") {
    auto work = [](int rank) -> int {
        if (rank == 5) throw std::runtime_error("rank five");
        if (rank == 2) throw std::runtime_error("rank two");
        return rank;
    };
    try {
        run_workers(8, work);
        FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "rank two");
    }
}

TEST_CASE("thread cap comes from the environment per call") {
    {
        ThreadCapGuard guard("2");
        CHECK(thread_cap(8) == 2);
        CHECK(thread_cap(1) == 1);  // cap never raises the count
    }
    {
        ThreadCapGuard guard("16");
        CHECK(thread_cap(4) == 4);
    }
    {
        ThreadCapGuard guard("not-a-number");
        CHECK(thread_cap(6) == 6);  // unparsable values are ignored
    }
    unsetenv("EXSUM_THREADS");
    CHECK(thread_cap(3) == 3);
}

TEST_CASE("parallel_sum with one rank matches the sequential strategy") {
    std::mt19937_64 rng(21);
    std::vector<float> xs(997);
    for (auto& x : xs) {
        x = std::ldexp(float(rng() % 8192) - 4096.0f, int(rng() % 40) - 20);
    }
    for (Strategy s : {Strategy::naive, Strategy::bucketed, Strategy::sorted,
                       Strategy::compensated, Strategy::exact}) {
        CHECK(bitwise_equal(parallel_sum(sp(xs), 1, s), strategy_sum(sp(xs), s)));
    }
}

TEST_CASE("rank count is a pure value parameter, independent of threads") {
    std::mt19937_64 rng(22);
    std::vector<float> xs(10007);
    for (auto& x : xs) {
        x = std::ldexp(float(rng() % 8192) - 4096.0f, int(rng() % 40) - 20);
    }
    for (Strategy s : {Strategy::naive, Strategy::bucketed}) {
        for (int P : {1, 3, 4, 16}) {
            float capped, uncapped;
            {
                ThreadCapGuard guard("1");
                capped = parallel_sum(sp(xs), P, s);
            }
            uncapped = parallel_sum(sp(xs), P, s);
            CHECK(bitwise_equal(capped, uncapped));
        }
    }
}

TEST_CASE("exactly representable data sums identically for every rank count") {
    std::vector<double> xs(1000);
    std::iota(xs.begin(), xs.end(), 1.0);  // 1..1000, all partials exact
    const double want = 500500.0;
    for (Strategy s : {Strategy::naive, Strategy::bucketed, Strategy::sorted,
                       Strategy::compensated, Strategy::exact}) {
        for (int P : {1, 2, 7, 16, 1000, 1500}) {
            CHECK(bitwise_equal(parallel_sum(sp(xs), P, s), want));
        }
    }
}

TEST_CASE("chunked core is the value semantics of parallel_sum") {
    std::mt19937_64 rng(23);
    std::vector<float> xs(4099);
    for (auto& x : xs) {
        x = std::ldexp(float(rng() % 8192) - 4096.0f, int(rng() % 50) - 25);
    }
    for (Strategy s : {Strategy::naive, Strategy::bucketed, Strategy::sorted,
                       Strategy::compensated, Strategy::exact}) {
        for (int P : {1, 2, 5, 8, 64}) {
            CHECK(bitwise_equal(detail::chunked_sum_unchecked(sp(xs), P, s),
                                parallel_sum(sp(xs), P, s)));
        }
    }
}

TEST_CASE("parallel_sum validates input once up front") {
    std::vector<float> xs{1.0f, std::numeric_limits<float>::infinity(), 2.0f};
    CHECK_THROWS_AS(parallel_sum(sp(xs), 4, Strategy::naive), NonFiniteInput);
    std::vector<float> ok{1.0f, 2.0f};
    CHECK_THROWS_AS(parallel_sum(sp(ok), 0, Strategy::naive), InvalidConfig);
}

TEST_CASE("empty input is +0 for any rank count") {
    std::vector<double> xs;
    for (int P : {1, 4, 32}) {
        CHECK(bitwise_equal(parallel_sum(sp(xs), P, Strategy::bucketed), 0.0));
        CHECK(bitwise_equal(parallel_sum(sp(xs), P, Strategy::naive), 0.0));
    }
}

TEST_CASE("rank results combine in ascending rank order") {
    // two ranks whose block sums absorb differently depending on order:
    // block 0 sums to 1e9, block 1 to 1e-9; ascending combine gives
    // fl(1e9 + 1e-9) = 1e9 (absorption is *expected* here -- the combine
    // step is plain addition by design)
    std::vector<float> xs{5e8f, 5e8f, 1e-9f, 0.0f};
    const float got = parallel_sum(sp(xs), 2, Strategy::naive);
    CHECK(bitwise_equal(got, 1e9f));
}
