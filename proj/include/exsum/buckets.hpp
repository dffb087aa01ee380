#pragma once

#include <array>
#include <span>

#include "exsum/float_format.hpp"

namespace exsum {

// One accumulation cell per raw exponent field value.  Adding values that
// share an exponent is nearly exact (at most the final carry bit rounds), so
// a pass over the data followed by an ascending-exponent sweep recovers the
// small-to-large ordering that makes summation accurate -- without sorting.
template <IeeeFloat T>
struct BucketArray {
    std::array<T, FloatFormat<T>::bucket_count> cells{};
    // Times a cell's running sum carried past its own exponent range.
    // Diagnostic only; the sweep in finalize() already tolerates it.
    long overflow_events = 0;

    void accumulate(T x) {
        const int idx = bucket_index(x);
        const T updated = cells[static_cast<std::size_t>(idx)] + x;
        cells[static_cast<std::size_t>(idx)] = updated;
        if (bucket_index(updated) > idx) ++overflow_events;
    }

    void accumulate(std::span<const T> xs) {
        for (T x : xs) accumulate(x);
    }

    // Fold cells from smallest exponent to largest.  All-zero cells fold to +0.
    T finalize() const {
        T acc{0};
        for (T cell : cells) acc += cell;
        return acc;
    }

    void clear() {
        cells.fill(T{0});
        overflow_events = 0;
    }
};

}  // namespace exsum
