#pragma once

#include <cmath>
#include <span>

#include "exsum/errors.hpp"
#include "exsum/float_format.hpp"
#include "exsum/kernels.hpp"

namespace exsum {

inline double abs_error(double computed, double reference) {
    return std::abs(computed - reference);
}

// Max-norm of the elementwise difference; differences taken in binary64 so
// the metric itself adds no working-precision rounding.
template <IeeeFloat T, IeeeFloat U>
double abs_error(const Vec<T>& computed, const Vec<U>& reference) {
    if (computed.size() != reference.size()) throw ShapeMismatch("vector lengths differ");
    double worst = 0.0;
    for (long i = 0; i < computed.size(); ++i)
        worst = std::max(worst, std::abs(static_cast<double>(computed(i)) -
                                         static_cast<double>(reference(i))));
    return worst;
}

// Share of elements bitwise equal between two runs, in percent.
template <IeeeFloat T>
double repro_pct(std::span<const T> run_a, std::span<const T> run_b) {
    if (run_a.size() != run_b.size()) throw ShapeMismatch("element counts differ");
    if (run_a.empty()) return 100.0;
    std::size_t equal = 0;
    for (std::size_t i = 0; i < run_a.size(); ++i)
        if (bitwise_equal(run_a[i], run_b[i])) ++equal;
    return 100.0 * static_cast<double>(equal) / static_cast<double>(run_a.size());
}

template <IeeeFloat T>
double repro_pct(const Mat<T>& run_a, const Mat<T>& run_b) {
    if (run_a.rows() != run_b.rows() || run_a.cols() != run_b.cols())
        throw ShapeMismatch("matrix shapes differ");
    return repro_pct(as_span(run_a), as_span(run_b));
}

// Convergence-speed comparison: iterations the original (naive) run needed
// minus iterations the accurate run needed.  Positive means the accurate
// strategy converged faster.
template <IeeeFloat T>
long iteration_gap(const IterationOutcome<T>& orig, const IterationOutcome<T>& acc) {
    if (!orig.converged || !acc.converged) throw NotConverged();
    return orig.iterations - acc.iterations;
}

}  // namespace exsum
