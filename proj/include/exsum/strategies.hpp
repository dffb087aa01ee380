#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exsum/buckets.hpp"
#include "exsum/errors.hpp"
#include "exsum/exact_sum.hpp"
#include "exsum/float_format.hpp"

namespace exsum {

enum class Strategy { naive, bucketed, sorted, compensated, exact };

constexpr std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::naive: return "naive";
        case Strategy::bucketed: return "bucketed";
        case Strategy::sorted: return "sorted";
        case Strategy::compensated: return "compensated";
        case Strategy::exact: return "exact";
    }
    return "?";
}

inline Strategy parse_strategy(std::string_view name) {
    for (Strategy s : {Strategy::naive, Strategy::bucketed, Strategy::sorted,
                       Strategy::compensated, Strategy::exact})
        if (strategy_name(s) == name) return s;
    throw InvalidConfig("unknown strategy: " + std::string(name));
}

namespace detail {

// Core folds, no input validation: callers either validated already or are
// the validating wrappers below.

template <IeeeFloat T>
T naive_unchecked(std::span<const T> xs) {
    if (xs.empty()) return T{0};
    T acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc += xs[i];
    return acc;
}

template <IeeeFloat T>
T bucketed_unchecked(std::span<const T> xs) {
    BucketArray<T> buckets;
    buckets.accumulate(xs);
    return buckets.finalize();
}

template <IeeeFloat T>
T sorted_unchecked(std::span<const T> xs) {
    std::vector<T> by_magnitude(xs.begin(), xs.end());
    std::stable_sort(by_magnitude.begin(), by_magnitude.end(),
                     [](T a, T b) { return std::abs(a) < std::abs(b); });
    return naive_unchecked(std::span<const T>(by_magnitude));
}

template <IeeeFloat T>
T compensated_unchecked(std::span<const T> xs) {
    T acc{0};
    T comp{0};
    for (T x : xs) {
        const T y = x - comp;
        const T t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc;
}

template <IeeeFloat T>
T exact_unchecked(std::span<const T> xs) {
    return sum_exact(xs);
}

template <IeeeFloat T>
T sum_unchecked(std::span<const T> xs, Strategy s) {
    switch (s) {
        case Strategy::naive: return naive_unchecked(xs);
        case Strategy::bucketed: return bucketed_unchecked(xs);
        case Strategy::sorted: return sorted_unchecked(xs);
        case Strategy::compensated: return compensated_unchecked(xs);
        case Strategy::exact: return exact_unchecked(xs);
    }
    return T{0};
}

}  // namespace detail

template <IeeeFloat T>
T sum_naive(std::span<const T> xs) {
    validate_finite(xs);
    return detail::naive_unchecked(xs);
}

template <IeeeFloat T>
T sum_bucketed(std::span<const T> xs) {
    validate_finite(xs);
    return detail::bucketed_unchecked(xs);
}

template <IeeeFloat T>
T sum_sorted(std::span<const T> xs) {
    validate_finite(xs);
    return detail::sorted_unchecked(xs);
}

template <IeeeFloat T>
T sum_compensated(std::span<const T> xs) {
    validate_finite(xs);
    return detail::compensated_unchecked(xs);
}

template <IeeeFloat T>
T strategy_sum(std::span<const T> xs, Strategy s) {
    validate_finite(xs);
    return detail::sum_unchecked(xs, s);
}

}  // namespace exsum
