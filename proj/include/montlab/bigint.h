/*
 * SPDX-FileCopyrightText: <text>Copyright 2026 The montlab authors</text>
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * This file is part of montlab, a Montgomery arithmetic and side-channel lab.
 */

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace montlab {

/// Fixed-width multi-precision unsigned integer.
///
/// The value is stored as a little-endian sequence of Word limbs. Every
/// value carries a declared capacity, bit_width, which is a positive multiple
/// of the word size; storage always holds exactly bit_width / word-size limbs
/// so that the value is below 2^bit_width and the limbs above the most
/// significant nonzero one are zero.
///
/// Comparison and equality are numeric: two values of different bit_width
/// compare equal when they denote the same integer.
template <typename Word> class BasicBigUint {
    static_assert(std::is_unsigned_v<Word> && sizeof(Word) <= 4,
                  "limbs must be unsigned and at most 32 bits wide");

  public:
    using word_type = Word;
    static constexpr std::size_t kWordBits = sizeof(Word) * 8;

    /// Zero, one word wide.
    BasicBigUint() : BasicBigUint(kWordBits) {}

    /// Zero with the given capacity, rounded up to a whole number of words.
    explicit BasicBigUint(std::size_t bit_width);

    static BasicBigUint from_u64(std::uint64_t value,
                                 std::size_t bit_width = 0);
    static BasicBigUint from_words(std::span<const Word> words,
                                   std::size_t bit_width = 0);

    /// Parse big-endian hex text with an optional 0x prefix. A bit_width of
    /// zero picks the smallest capacity that holds every digit given.
    static BasicBigUint from_hex(std::string_view text,
                                 std::size_t bit_width = 0);

    /// Big-endian bytes, most significant first.
    static BasicBigUint from_bytes_be(std::span<const std::uint8_t> bytes,
                                      std::size_t bit_width = 0);

    /// 2^exponent.
    static BasicBigUint power_of_two(std::size_t exponent,
                                     std::size_t bit_width = 0);

    /// Lowercase hex without prefix or leading zeros ("0" for zero).
    std::string to_hex() const;
    std::vector<std::uint8_t> to_bytes_be() const;

    std::size_t bit_width() const { return bit_width_; }
    std::size_t word_count() const { return words_.size(); }
    std::span<const Word> words() const { return words_; }
    std::span<Word> words_mut() { return words_; }

    /// Limb i, or zero past the end.
    Word word(std::size_t i) const { return i < words_.size() ? words_[i] : 0; }

    bool bit(std::size_t i) const;
    void set_bit(std::size_t i, bool value = true);

    /// Bits i .. i+count-1 as an integer; count <= 64.
    std::uint64_t bits(std::size_t i, std::size_t count) const;

    /// Position of the highest set bit plus one; zero for zero.
    std::size_t bit_length() const;
    std::size_t popcount() const;
    bool is_zero() const;
    bool is_odd() const { return !words_.empty() && (words_[0] & 1); }

    /// The value as uint64; throws DomainError when it does not fit.
    std::uint64_t to_u64() const;

    /// Same value with a different capacity; throws DomainError when the
    /// value does not fit.
    BasicBigUint resized(std::size_t bit_width) const;

    /// Storage matches the declared width (the canonical-form invariant).
    bool is_canonical() const;

    friend bool operator==(const BasicBigUint &a, const BasicBigUint &b) {
        return compare(a, b) == 0;
    }
    friend std::strong_ordering operator<=>(const BasicBigUint &a,
                                            const BasicBigUint &b) {
        return compare(a, b) <=> 0;
    }

  private:
    static int compare(const BasicBigUint &a, const BasicBigUint &b);

    std::vector<Word> words_;
    std::size_t bit_width_;
};

/// Round a bit count up to a whole, nonzero number of Word limbs.
template <typename Word> constexpr std::size_t round_to_words(std::size_t bits) {
    constexpr std::size_t wb = sizeof(Word) * 8;
    return bits == 0 ? wb : (bits + wb - 1) / wb * wb;
}

template <typename Word> struct SumWithCarry {
    BasicBigUint<Word> value;
    bool carry;
};

template <typename Word> struct DiffWithBorrow {
    BasicBigUint<Word> value;
    bool borrow;
};

template <typename Word> struct QuotRem {
    BasicBigUint<Word> quotient;
    BasicBigUint<Word> remainder;
};

/// a + b modulo 2^max(width), with the carry out.
template <typename Word>
SumWithCarry<Word> add(const BasicBigUint<Word> &a, const BasicBigUint<Word> &b);

/// a - b modulo 2^max(width); borrow is set iff a < b.
template <typename Word>
DiffWithBorrow<Word> sub(const BasicBigUint<Word> &a,
                         const BasicBigUint<Word> &b);

template <typename Word>
std::strong_ordering cmp(const BasicBigUint<Word> &a,
                         const BasicBigUint<Word> &b) {
    return a <=> b;
}

/// a * 2^bits. The result is widened so nothing is lost.
template <typename Word>
BasicBigUint<Word> shift_left(const BasicBigUint<Word> &a, std::size_t bits);

/// floor(a / 2^bits), keeping a's width.
template <typename Word>
BasicBigUint<Word> shift_right(const BasicBigUint<Word> &a, std::size_t bits);

/// a / 2^bits where the division must be exact. Throws InvariantError when
/// any of the discarded bits is set.
template <typename Word>
BasicBigUint<Word> shift_right_exact(const BasicBigUint<Word> &a,
                                     std::size_t bits);

/// Full product, width(a) + width(b) bits.
template <typename Word>
BasicBigUint<Word> mul(const BasicBigUint<Word> &a, const BasicBigUint<Word> &b);

/// a * f, one word wider than a.
template <typename Word>
BasicBigUint<Word> mul_word(const BasicBigUint<Word> &a, Word f);

/// Binary long division. Throws DomainError for a zero divisor.
template <typename Word>
QuotRem<Word> divmod(const BasicBigUint<Word> &a, const BasicBigUint<Word> &m);

/// a mod m by shift-and-subtract; the result has m's width.
template <typename Word>
BasicBigUint<Word> mod_reduce(const BasicBigUint<Word> &a,
                              const BasicBigUint<Word> &m);

/// Returns m' with m * m' == -1 (mod 2^bits), lifted from the inverse mod 2
/// by Newton iteration. Throws DomainError for even m or bits > word size.
template <typename Word>
Word neg_inv_mod_pow2(const BasicBigUint<Word> &m, unsigned bits);

template <typename Word>
std::size_t hamming_distance(const BasicBigUint<Word> &a,
                             const BasicBigUint<Word> &b);

/// Binary GCD.
template <typename Word>
BasicBigUint<Word> gcd(BasicBigUint<Word> a, BasicBigUint<Word> b);

#define MONTLAB_BIGINT_EXTERN(W)                                               \
    extern template class BasicBigUint<W>;                                     \
    extern template SumWithCarry<W> add(const BasicBigUint<W> &,               \
                                        const BasicBigUint<W> &);              \
    extern template DiffWithBorrow<W> sub(const BasicBigUint<W> &,             \
                                          const BasicBigUint<W> &);            \
    extern template BasicBigUint<W> shift_left(const BasicBigUint<W> &,        \
                                               std::size_t);                   \
    extern template BasicBigUint<W> shift_right(const BasicBigUint<W> &,       \
                                                std::size_t);                  \
    extern template BasicBigUint<W> shift_right_exact(const BasicBigUint<W> &, \
                                                      std::size_t);            \
    extern template BasicBigUint<W> mul(const BasicBigUint<W> &,               \
                                        const BasicBigUint<W> &);              \
    extern template BasicBigUint<W> mul_word(const BasicBigUint<W> &, W);      \
    extern template QuotRem<W> divmod(const BasicBigUint<W> &,                 \
                                      const BasicBigUint<W> &);                \
    extern template BasicBigUint<W> mod_reduce(const BasicBigUint<W> &,        \
                                               const BasicBigUint<W> &);       \
    extern template W neg_inv_mod_pow2(const BasicBigUint<W> &, unsigned);     \
    extern template std::size_t hamming_distance(const BasicBigUint<W> &,      \
                                                 const BasicBigUint<W> &);     \
    extern template BasicBigUint<W> gcd(BasicBigUint<W>, BasicBigUint<W>);

MONTLAB_BIGINT_EXTERN(std::uint8_t)
MONTLAB_BIGINT_EXTERN(std::uint16_t)
MONTLAB_BIGINT_EXTERN(std::uint32_t)

#undef MONTLAB_BIGINT_EXTERN

/// The word size used throughout the library mirrors the 32-bit data bus.
using BigUint = BasicBigUint<std::uint32_t>;

} // namespace montlab
