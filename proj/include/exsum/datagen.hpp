#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "exsum/errors.hpp"
#include "exsum/exact_sum.hpp"
#include "exsum/kernels.hpp"

namespace exsum {

// splitmix64.  The recurrence is part of the data contract: any
// implementation that follows it reproduces our datasets bit for bit, so
// keep it frozen.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53 random bits
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Decade mix of the generated data: a frac_large share of entries lands at
// large_scale, the remainder is split evenly between medium and small (the
// odd element goes to medium).  Magnitudes are uniform in [1, 10) times the
// scale so each element's decade is unambiguous.
struct MagnitudeProfile {
    double frac_large = 0.3;
    double large_scale = 1e7;
    double medium_scale = 1.0;
    double small_scale = 1e-7;
    bool sign_mix = true;
};

namespace detail {

// Draw order is part of the contract: all large magnitudes, then medium,
// then small (per element: magnitude draw, then sign draw), followed by one
// Fisher-Yates shuffle pass.  Callers that continue with the same Rng get a
// well-defined stream position.
template <IeeeFloat T>
Vec<T> gen_vector_stream(Rng& rng, long n, const MagnitudeProfile& profile) {
    const long n_large =
        static_cast<long>(std::floor(profile.frac_large * static_cast<double>(n)));
    const long rem = n - n_large;
    const long n_medium = rem - rem / 2;
    const long n_small = rem / 2;

    Vec<T> out(n);
    long filled = 0;
    auto draw_class = [&](long count, double scale) {
        for (long i = 0; i < count; ++i) {
            const double u = rng.unit();
            double mag = (1.0 + 9.0 * u) * scale;
            if (profile.sign_mix && (rng.next() & 1ULL)) mag = -mag;
            out(filled++) = static_cast<T>(mag);
        }
    };
    draw_class(n_large, profile.large_scale);
    draw_class(n_medium, profile.medium_scale);
    draw_class(n_small, profile.small_scale);

    for (long i = n - 1; i >= 1; --i) {
        const long j = static_cast<long>(rng.next() % static_cast<std::uint64_t>(i + 1));
        std::swap(out(i), out(j));
    }
    return out;
}

}  // namespace detail

template <IeeeFloat T>
Vec<T> gen_vector(long n, const MagnitudeProfile& profile, std::uint64_t seed) {
    Rng rng(seed);
    return detail::gen_vector_stream<T>(rng, n, profile);
}

// n*n entries from the gen_vector stream, filled row-major.  diagonal_boost
// adds the largest row-magnitude sum to every diagonal entry, which forces
// strict diagonal dominance and keeps LU pivots healthy.
template <IeeeFloat T>
Mat<T> gen_matrix(long n, const MagnitudeProfile& profile, std::uint64_t seed,
                  bool diagonal_boost = false) {
    Rng rng(seed);
    const Vec<T> flat = detail::gen_vector_stream<T>(rng, n * n, profile);
    Mat<T> A(n, n);
    for (long i = 0; i < n * n; ++i) A.data()[i] = flat(i);
    if (diagonal_boost && n > 0) {
        double worst = 0.0;
        for (long i = 0; i < n; ++i) {
            double row = 0.0;
            for (long j = 0; j < n; ++j) row += std::abs(static_cast<double>(A(i, j)));
            worst = std::max(worst, row);
        }
        const T boost = static_cast<T>(worst);
        for (long i = 0; i < n; ++i) A(i, i) = A(i, i) + boost;
    }
    return A;
}

template <IeeeFloat T>
struct JacobiSystem {
    Mat<T> A;
    Vec<T> b;
    Vec<T> x_true;
};

// Near-unstable diagonally dominant system: |a_ii| = (1+delta) * sum of the
// row's off-diagonal magnitudes, diagonal sign random.  The off-diagonals
// carry the mixed-magnitude profile, so the row sums the Jacobi update
// evaluates are exactly the kind of cancellation-heavy sequences the
// summation strategies differ on.  b comes from the exact oracle: the true
// product A*x_true rounded once to working precision.
template <IeeeFloat T>
JacobiSystem<T> gen_jacobi_system(long n, double delta, std::uint64_t seed) {
    Rng rng(seed);
    const MagnitudeProfile off_profile{};  // 30% large, signs mixed
    const Vec<T> off = detail::gen_vector_stream<T>(rng, n * (n - 1), off_profile);

    JacobiSystem<T> sys;
    sys.A = Mat<T>(n, n);
    long c = 0;
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j)
            if (j != i) sys.A(i, j) = off(c++);

    for (long i = 0; i < n; ++i) {
        double row = 0.0;
        for (long j = 0; j < n; ++j)
            if (j != i) row += std::abs(static_cast<double>(sys.A(i, j)));
        double diag = (1.0 + delta) * row;
        if (rng.next() & 1ULL) diag = -diag;
        sys.A(i, i) = static_cast<T>(diag);
    }

    sys.x_true = Vec<T>(n);
    for (long i = 0; i < n; ++i) {
        double v = 1.0 + 9.0 * rng.unit();
        if (rng.next() & 1ULL) v = -v;
        sys.x_true(i) = static_cast<T>(v);
    }

    sys.b = Vec<T>(n);
    ExactAccumulator<double> acc;
    for (long i = 0; i < n; ++i) {
        acc.clear();
        for (long j = 0; j < n; ++j)
            acc.add(static_cast<double>(sys.A(i, j)) * static_cast<double>(sys.x_true(j)));
        sys.b(i) = acc.round_to<T>();
    }
    return sys;
}

// d on the diagonal, 0.01 everywhere else -- a rank-one perturbation of
// (d - 0.01) * I whose dominant eigenvalue is d - 0.01 + 0.01 n.
template <IeeeFloat T>
Mat<T> gen_power_matrix(long n, double d) {
    Mat<T> A = Mat<T>::Constant(n, n, static_cast<T>(0.01));
    for (long i = 0; i < n; ++i) A(i, i) = static_cast<T>(d);
    return A;
}

// --------------------------------------------------------------------------
// Raw dataset interchange: 8-byte magic, then little-endian raw floats.

inline constexpr char dataset_magic[8] = {'E', 'X', 'S', 'U', 'M', 'D', 'A', 'T'};

static_assert(std::endian::native == std::endian::little,
              "dataset files are little-endian raw floats");

template <IeeeFloat T>
void dump_dataset(const std::filesystem::path& path, std::span<const T> xs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(dataset_magic, sizeof dataset_magic);
    out.write(reinterpret_cast<const char*>(xs.data()),
              static_cast<std::streamsize>(xs.size_bytes()));
    if (!out) throw IoError("short write: " + path.string());
}

template <IeeeFloat T>
std::vector<T> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    char magic[8];
    if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + 8, dataset_magic))
        throw IoError("bad dataset header: " + path.string());
    std::vector<char> raw(std::istreambuf_iterator<char>(in), {});
    if (raw.size() % sizeof(T) != 0)
        throw IoError("payload is not a whole number of elements: " + path.string());
    std::vector<T> xs(raw.size() / sizeof(T));
    std::memcpy(xs.data(), raw.data(), raw.size());
    return xs;
}

}  // namespace exsum
