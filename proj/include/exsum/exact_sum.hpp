#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>

#include "exsum/errors.hpp"
#include "exsum/float_format.hpp"

namespace exsum {

// Fixed-point superaccumulator: the exact-oracle strategy.
//
// The running sum is held as a signed integer spread over 32-bit limbs, wide
// enough to cover the format's full finite range plus 2^31 summands of
// headroom, so accumulation never rounds.  round_to<Out>() collapses the
// limbs once, with round-to-nearest-even at Out's precision (subnormal
// outputs round at their fixed ulp instead).
//
// An ExactAccumulator<double> also serves as an exact dot-product engine for
// float data: the product of two binary32 values is exactly representable in
// binary64, so add(double(a) * double(b)) stays error-free.
template <IeeeFloat T>
class ExactAccumulator {
    using F = FloatFormat<T>;
    // Lowest representable bit is 2^(emin - mantissa_bits); anchor the limb
    // grid one limb below so index arithmetic never goes negative.
    static constexpr int lsb_exp = F::exp_min - F::mantissa_bits;  // -149 / -1074
    static constexpr int offset = ((lsb_exp - 31) / 32) * 32;      // -160 / -1088
    static constexpr int top_exp = F::exp_max + 2 + 31;            // range + headroom
    static constexpr int n_limbs = (top_exp - offset) / 32 + 2;

  public:
    void add(T x) {
        using B = typename F::bits_type;
        const B bits = std::bit_cast<B>(x);
        const B mant_mask = (B{1} << F::mantissa_bits) - 1;
        const int expf = static_cast<int>((bits >> F::mantissa_bits) & ((B{1} << F::exp_bits) - 1));
        if (expf == (1 << F::exp_bits) - 1) throw NonFiniteInput();
        B mant = bits & mant_mask;
        int e;  // exponent of the mantissa's least significant bit
        if (expf == 0) {
            e = lsb_exp;  // subnormal (or zero)
        } else {
            mant |= B{1} << F::mantissa_bits;
            e = expf - F::exp_bias - F::mantissa_bits;
        }
        if (mant == 0) return;
        const int bitpos = e - offset;
        const int limb = bitpos >> 5;
        const int shift = bitpos & 31;
        const bool negative = bits >> (F::total_bits - 1);
        unsigned __int128 wide = static_cast<unsigned __int128>(mant) << shift;
        for (int k = 0; wide != 0; ++k, wide >>= 32) {
            const auto chunk = static_cast<std::int64_t>(static_cast<std::uint32_t>(wide));
            limbs_[limb + k] += negative ? -chunk : chunk;
        }
        if (++pending_ == (1 << 28)) carry_propagate();
    }

    void add(std::span<const T> xs) {
        for (T x : xs) add(x);
    }

    // Collapse to Out with a single correctly-rounded conversion.
    template <IeeeFloat Out = T>
    Out round_to() const {
        std::array<std::int64_t, n_limbs> acc = limbs_;
        propagate(acc);
        bool negative = false;
        if (acc[n_limbs - 1] < 0) {  // two's-complement negate across limbs
            negative = true;
            std::int64_t borrow = 0;
            for (int i = 0; i < n_limbs; ++i) {
                std::int64_t v = -acc[i] + borrow;
                borrow = v >> 32;
                acc[i] = v & 0xFFFFFFFF;
            }
        }
        int top = n_limbs - 1;
        while (top >= 0 && acc[top] == 0) --top;
        if (top < 0) return Out{0};
        const int msb = top * 32 + 63 - std::countl_zero(static_cast<std::uint64_t>(acc[top]));

        using OF = FloatFormat<Out>;
        const int sub_lsb = (OF::exp_min - OF::mantissa_bits) - offset;
        int lsb = msb - OF::mantissa_bits;  // position of the result ulp
        if (lsb < sub_lsb) lsb = sub_lsb;
        if (lsb < 0) lsb = 0;  // Out is wider than the grid: exact

        std::uint64_t m = extract(acc, lsb, msb);
        const bool guard = lsb > 0 && bit_at(acc, lsb - 1);
        const bool sticky = guard && any_below(acc, lsb - 1);
        if (guard && (sticky || (m & 1))) ++m;
        Out mag = std::ldexp(static_cast<Out>(m), lsb + offset);
        return negative ? -mag : mag;
    }

    void clear() {
        limbs_.fill(0);
        pending_ = 0;
    }

  private:
    static void propagate(std::array<std::int64_t, n_limbs>& a) {
        std::int64_t carry = 0;
        for (int i = 0; i < n_limbs; ++i) {
            const std::int64_t v = a[i] + carry;
            carry = v >> 32;  // arithmetic shift: floor division by 2^32
            a[i] = v - (carry << 32);
        }
        // headroom guarantees the final carry is pure sign extension
        if (carry < 0) a[n_limbs - 1] -= std::int64_t{1} << 32;
    }

    static bool bit_at(const std::array<std::int64_t, n_limbs>& a, int pos) {
        return (static_cast<std::uint64_t>(a[pos >> 5]) >> (pos & 31)) & 1;
    }

    static bool any_below(const std::array<std::int64_t, n_limbs>& a, int pos) {
        for (int i = 0; i < pos >> 5; ++i)
            if (a[i] != 0) return true;
        const std::uint64_t mask = (std::uint64_t{1} << (pos & 31)) - 1;
        return (static_cast<std::uint64_t>(a[pos >> 5]) & mask) != 0;
    }

    static std::uint64_t extract(const std::array<std::int64_t, n_limbs>& a, int lo, int hi) {
        std::uint64_t out = 0;
        for (int pos = hi; pos >= lo; --pos) out = (out << 1) | (bit_at(a, pos) ? 1 : 0);
        return out;
    }

    void carry_propagate() {
        propagate(limbs_);
        pending_ = 0;
    }

    std::array<std::int64_t, n_limbs> limbs_{};
    long pending_ = 0;
};

template <IeeeFloat T>
T sum_exact(std::span<const T> xs) {
    ExactAccumulator<T> acc;
    acc.add(xs);
    return acc.template round_to<T>();
}

}  // namespace exsum
