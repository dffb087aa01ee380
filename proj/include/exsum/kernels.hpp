#pragma once

#include <Eigen/Core>
#include <cmath>
#include <utility>
#include <vector>

#include "exsum/errors.hpp"
#include "exsum/exact_sum.hpp"
#include "exsum/parallel.hpp"
#include "exsum/strategies.hpp"

namespace exsum {

// Row-major so a validate pass over .data() walks rows contiguously and a
// row's off-diagonal products stream in memory order.
template <IeeeFloat T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <IeeeFloat T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <IeeeFloat T>
std::span<const T> as_span(const Mat<T>& m) {
    return {m.data(), static_cast<std::size_t>(m.size())};
}

template <IeeeFloat T>
std::span<const T> as_span(const Vec<T>& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

template <IeeeFloat T>
struct IterationOutcome {
    Vec<T> solution;
    long iterations = 0;
    bool converged = false;
    double final_residual = 0.0;
};

template <IeeeFloat T>
struct PowerOutcome {
    IterationOutcome<T> outcome;
    T eigenvalue{0};  // y[0] of the last iteration, before normalization
};

// ---------------------------------------------------------------------------
// Composite Simpson quadrature of C * f over [0, b]

enum class Integrand { cosine, inverse_quadratic, hyperbolic_tangent };

constexpr std::string_view integrand_name(Integrand f) {
    switch (f) {
        case Integrand::cosine: return "cos";
        case Integrand::inverse_quadratic: return "invquad";
        case Integrand::hyperbolic_tangent: return "tanh";
    }
    return "?";
}

inline Integrand parse_integrand(std::string_view name) {
    for (Integrand f : {Integrand::cosine, Integrand::inverse_quadratic,
                        Integrand::hyperbolic_tangent})
        if (integrand_name(f) == name) return f;
    throw InvalidConfig("unknown integrand: " + std::string(name));
}

template <IeeeFloat T>
T eval_integrand(Integrand f, T x) {
    switch (f) {
        case Integrand::cosine: return std::cos(x);
        case Integrand::inverse_quadratic: return T{1} / (x * x + T{1});
        case Integrand::hyperbolic_tangent: return std::tanh(x);
    }
    return T{0};
}

// Analytic value of C * integral of f over [0, b], for error measurement.
inline double integrand_reference(Integrand f, double b, double C) {
    switch (f) {
        case Integrand::cosine: return C * std::sin(b);
        case Integrand::inverse_quadratic: return C * std::atan(b);
        case Integrand::hyperbolic_tangent: return C * std::log(std::cosh(b));
    }
    return 0.0;
}

// (h/3) * parallel strategy-sum of the weighted samples w_k * C * f(x_k),
// weights 1,4,2,...,4,1.  Sample abscissas and the C scaling are formed
// through binary64 and rounded once to T, so the sample values are a pure
// function of (f, b, m, C) independent of T's expression evaluation quirks.
template <IeeeFloat T>
T simpson_integrate(Integrand f, double b, long m, double C, Strategy strategy, int P) {
    if (m < 2 || m % 2 != 0) throw OddSubintervalCount();
    const T h = static_cast<T>(b / static_cast<double>(m));
    std::vector<T> samples(static_cast<std::size_t>(m) + 1);
    for (long k = 0; k <= m; ++k) {
        const T x = static_cast<T>(static_cast<double>(h) * static_cast<double>(k));
        const T fx = eval_integrand(f, x);
        const T scaled = static_cast<T>(C * static_cast<double>(fx));
        const T w = (k == 0 || k == m) ? T{1} : (k % 2 != 0 ? T{4} : T{2});
        samples[static_cast<std::size_t>(k)] = w * scaled;
    }
    const T total = parallel_sum(std::span<const T>(samples), P, strategy);
    return static_cast<T>(static_cast<double>(h) / 3.0) * total;
}

// ---------------------------------------------------------------------------
// Doolittle LU factorization, no pivoting

// Each L/U entry subtracts a strategy-summed dot product of previously
// computed factors; per elimination step the entries of a row (resp. column)
// are independent, so they are distributed over P ranks block-wise.
template <IeeeFloat T>
std::pair<Mat<T>, Mat<T>> lu_factorize(const Mat<T>& A, Strategy strategy, int P) {
    if (A.rows() != A.cols()) throw DimensionMismatch("matrix must be square");
    validate_finite(as_span(A));
    const long n = A.rows();
    Mat<T> L = Mat<T>::Identity(n, n);
    Mat<T> U = Mat<T>::Zero(n, n);

    for (long i = 0; i < n; ++i) {
        const BlockPartition row_part{n - i, P};
        run_workers(P, [&](int rank) {
            std::vector<T> products(static_cast<std::size_t>(i));
            const auto [lo, hi] = row_part.block(rank);
            for (long jj = lo; jj < hi; ++jj) {
                const long j = i + jj;
                for (long k = 0; k < i; ++k)
                    products[static_cast<std::size_t>(k)] = L(i, k) * U(k, j);
                validate_finite(std::span<const T>(products));
                const T dot = detail::sum_unchecked(std::span<const T>(products), strategy);
                U(i, j) = A(i, j) - dot;
            }
            return 0;
        });
        if (U(i, i) == T{0}) throw ZeroPivot(static_cast<int>(i));

        const BlockPartition col_part{n - i - 1, P};
        run_workers(P, [&](int rank) {
            std::vector<T> products(static_cast<std::size_t>(i));
            const auto [lo, hi] = col_part.block(rank);
            for (long jj = lo; jj < hi; ++jj) {
                const long j = i + 1 + jj;
                for (long k = 0; k < i; ++k)
                    products[static_cast<std::size_t>(k)] = L(j, k) * U(k, i);
                validate_finite(std::span<const T>(products));
                const T dot = detail::sum_unchecked(std::span<const T>(products), strategy);
                L(j, i) = (A(j, i) - dot) / U(i, i);
            }
            return 0;
        });
    }
    validate_finite(as_span(L));
    validate_finite(as_span(U));
    return {std::move(L), std::move(U)};
}

// Forward/back substitution with strategy-summed dot products.
template <IeeeFloat T>
Vec<T> lu_solve(const Mat<T>& L, const Mat<T>& U, const Vec<T>& b, Strategy strategy) {
    const long n = L.rows();
    if (L.cols() != n || U.rows() != n || U.cols() != n)
        throw DimensionMismatch("factor shapes disagree");
    if (b.size() != n) throw ShapeMismatch("right-hand side length");
    validate_finite(as_span(L));
    validate_finite(as_span(U));
    validate_finite(as_span(b));

    std::vector<T> products(static_cast<std::size_t>(n));
    Vec<T> y(n);
    for (long i = 0; i < n; ++i) {
        for (long k = 0; k < i; ++k)
            products[static_cast<std::size_t>(k)] = L(i, k) * y(k);
        const std::span<const T> dot_span(products.data(), static_cast<std::size_t>(i));
        validate_finite(dot_span);
        y(i) = b(i) - detail::sum_unchecked(dot_span, strategy);
    }
    Vec<T> x(n);
    for (long i = n - 1; i >= 0; --i) {
        if (U(i, i) == T{0}) throw ZeroPivot(static_cast<int>(i));
        long c = 0;
        for (long k = i + 1; k < n; ++k)
            products[static_cast<std::size_t>(c++)] = U(i, k) * x(k);
        const std::span<const T> dot_span(products.data(), static_cast<std::size_t>(c));
        validate_finite(dot_span);
        x(i) = (y(i) - detail::sum_unchecked(dot_span, strategy)) / U(i, i);
    }
    return x;
}

namespace detail {

// Exact max-norm residual ||A*x - b||_inf: per-row dot products accumulate
// error-free (products of T values are exact in binary64), rounded once.
template <IeeeFloat T>
double exact_residual(const Mat<T>& A, const Vec<T>& x, const Vec<T>& b) {
    const long n = A.rows();
    double worst = 0.0;
    ExactAccumulator<double> acc;
    for (long i = 0; i < n; ++i) {
        acc.clear();
        for (long j = 0; j < n; ++j)
            acc.add(static_cast<double>(A(i, j)) * static_cast<double>(x(j)));
        acc.add(-static_cast<double>(b(i)));
        worst = std::max(worst, std::abs(acc.round_to<double>()));
    }
    return worst;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Jacobi iteration for strictly diagonally dominant systems

template <IeeeFloat T>
IterationOutcome<T> jacobi_solve(const Mat<T>& A, const Vec<T>& b, double eps,
                                 long max_iter, Strategy strategy, int P) {
    const long n = A.rows();
    if (A.cols() != n) throw DimensionMismatch("matrix must be square");
    if (n < 1) throw DimensionMismatch("matrix must be non-empty");
    if (b.size() != n) throw ShapeMismatch("right-hand side length");
    validate_finite(as_span(A));
    validate_finite(as_span(b));
    for (long i = 0; i < n; ++i) {
        double off = 0.0;
        for (long j = 0; j < n; ++j)
            if (j != i) off += std::abs(static_cast<double>(A(i, j)));
        if (!(std::abs(static_cast<double>(A(i, i))) > off)) throw NotDiagonallyDominant();
    }

    IterationOutcome<T> out;
    Vec<T> x = Vec<T>::Zero(n);
    Vec<T> next(n);
    const BlockPartition rows{n, P};
    for (long it = 1; it <= max_iter; ++it) {
        auto rank_steps = run_workers(P, [&](int rank) {
            std::vector<T> products(static_cast<std::size_t>(n) - 1);
            const auto [lo, hi] = rows.block(rank);
            T rank_step{0};
            for (long i = lo; i < hi; ++i) {
                long c = 0;
                for (long j = 0; j < n; ++j)
                    if (j != i) products[static_cast<std::size_t>(c++)] = A(i, j) * x(j);
                const T row_sum =
                    detail::sum_unchecked(std::span<const T>(products), strategy);
                next(i) = (b(i) - row_sum) / A(i, i);
                rank_step = std::max(rank_step, std::abs(next(i) - x(i)));
            }
            return rank_step;
        });
        validate_finite(as_span(next));
        T step{0};
        for (T s : rank_steps) step = std::max(step, s);
        x.swap(next);
        out.iterations = it;
        if (static_cast<double>(step) < eps) {
            out.converged = true;
            break;
        }
    }
    out.solution = std::move(x);
    out.final_residual = detail::exact_residual(A, out.solution, b);
    return out;
}

// ---------------------------------------------------------------------------
// Power iteration, normalization pinned to component 0

// Row sums put the diagonal product last: absorption of the small
// off-diagonal contributions into the dominant term is then a property of
// the summation strategy, not of a lucky evaluation order.
template <IeeeFloat T>
PowerOutcome<T> power_method(const Mat<T>& A, double eps, long max_iter,
                             Strategy strategy, int P) {
    const long n = A.rows();
    if (A.cols() != n) throw DimensionMismatch("matrix must be square");
    if (n < 1) throw DimensionMismatch("matrix must be non-empty");
    validate_finite(as_span(A));

    PowerOutcome<T> result;
    Vec<T> x = Vec<T>::Zero(n);
    x(0) = T{1};
    Vec<T> y(n);
    const BlockPartition rows{n, P};
    for (long it = 1; it <= max_iter; ++it) {
        run_workers(P, [&](int rank) {
            std::vector<T> products(static_cast<std::size_t>(n));
            const auto [lo, hi] = rows.block(rank);
            for (long i = lo; i < hi; ++i) {
                long c = 0;
                for (long j = 0; j < n; ++j)
                    if (j != i) products[static_cast<std::size_t>(c++)] = A(i, j) * x(j);
                products[static_cast<std::size_t>(c)] = A(i, i) * x(i);
                y(i) = detail::sum_unchecked(std::span<const T>(products), strategy);
            }
            return 0;
        });
        validate_finite(as_span(y));
        const T lambda = y(0);
        if (lambda == T{0}) throw ZeroNormalizer();
        T step{0};
        for (long i = 0; i < n; ++i) {
            const T xi = y(i) / lambda;
            step = std::max(step, std::abs(xi - x(i)));
            x(i) = xi;
        }
        result.eigenvalue = lambda;
        result.outcome.iterations = it;
        if (static_cast<double>(step) < eps) {
            result.outcome.converged = true;
            break;
        }
    }
    // exact ||A*x - lambda*x||_inf: both product families are error-free in binary64
    const long nn = n;
    double worst = 0.0;
    ExactAccumulator<double> acc;
    for (long i = 0; i < nn; ++i) {
        acc.clear();
        for (long j = 0; j < nn; ++j)
            acc.add(static_cast<double>(A(i, j)) * static_cast<double>(x(j)));
        acc.add(-(static_cast<double>(result.eigenvalue) * static_cast<double>(x(i))));
        worst = std::max(worst, std::abs(acc.round_to<double>()));
    }
    result.outcome.final_residual = worst;
    result.outcome.solution = std::move(x);
    return result;
}

// ---------------------------------------------------------------------------
// Matrix product with per-element chunked reduction

// Every element c_ij reduces its product sequence a_ik*b_kj with
// parallel_sum itself: P contiguous k-chunks, each strategy-summed, chunk
// results combined in ascending order.  Rows of C are distributed over ranks
// for execution; that distribution cannot affect values.
template <IeeeFloat T>
Mat<T> matmul(const Mat<T>& A, const Mat<T>& B, Strategy strategy, int P) {
    if (A.cols() != B.rows()) throw DimensionMismatch();
    validate_finite(as_span(A));
    validate_finite(as_span(B));
    const long rows = A.rows();
    const long K = A.cols();
    const long cols = B.cols();
    Mat<T> C(rows, cols);

    const BlockPartition row_part{rows, P};
    run_workers(P, [&](int rank) {
        std::vector<T> products(static_cast<std::size_t>(K));
        const auto [lo, hi] = row_part.block(rank);
        for (long i = lo; i < hi; ++i)
            for (long j = 0; j < cols; ++j) {
                for (long k = 0; k < K; ++k)
                    products[static_cast<std::size_t>(k)] = A(i, k) * B(k, j);
                validate_finite(std::span<const T>(products));
                C(i, j) = detail::chunked_sum_unchecked(std::span<const T>(products), P, strategy);
            }
        return 0;
    });
    return C;
}

}  // namespace exsum
