#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>

#include "exsum/errors.hpp"

namespace exsum {

// Compile-time description of an IEEE754 binary format.  The bucket count is
// the number of distinct raw exponent-field values excluding the Inf/NaN code:
// zeros and subnormals share slot 0 with the paper's lowest exponent class.
template <class T>
struct FloatFormat;

template <>
struct FloatFormat<float> {
    using bits_type = std::uint32_t;
    static constexpr int total_bits = 32;
    static constexpr int precision_f = 24;
    static constexpr int exp_bits = 8;
    static constexpr int exp_min = -126;
    static constexpr int exp_max = 127;
    static constexpr int bucket_count = exp_max - exp_min + 2;  // 255
    static constexpr int mantissa_bits = precision_f - 1;
    static constexpr int exp_bias = 127;
    static constexpr const char* name = "b32";
};

template <>
struct FloatFormat<double> {
    using bits_type = std::uint64_t;
    static constexpr int total_bits = 64;
    static constexpr int precision_f = 53;
    static constexpr int exp_bits = 11;
    static constexpr int exp_min = -1022;
    static constexpr int exp_max = 1023;
    static constexpr int bucket_count = exp_max - exp_min + 2;  // 2047
    static constexpr int mantissa_bits = precision_f - 1;
    static constexpr int exp_bias = 1023;
    static constexpr const char* name = "b64";
};

template <class T>
concept IeeeFloat = std::is_same_v<T, float> || std::is_same_v<T, double>;

// Raw biased exponent field.  Finite inputs only; subnormals and both zeros
// land in bucket 0.
template <IeeeFloat T>
constexpr int bucket_index(T x) noexcept {
    using F = FloatFormat<T>;
    const auto bits = std::bit_cast<typename F::bits_type>(x);
    return static_cast<int>((bits >> F::mantissa_bits) &
                            ((typename F::bits_type{1} << F::exp_bits) - 1));
}

template <IeeeFloat T>
bool bitwise_equal(T a, T b) noexcept {
    using B = typename FloatFormat<T>::bits_type;
    return std::bit_cast<B>(a) == std::bit_cast<B>(b);
}

template <IeeeFloat T>
void validate_finite(std::span<const T> xs) {
    for (const T& x : xs)
        if (!std::isfinite(x)) throw NonFiniteInput{};
}

}  // namespace exsum
