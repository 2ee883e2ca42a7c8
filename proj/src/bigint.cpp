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

#include "montlab/bigint.h"
#include "montlab/detail/limbs.h"
#include "montlab/errors.h"

#include <algorithm>
#include <bit>
#include <cctype>

namespace montlab {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    c = char(std::tolower(static_cast<unsigned char>(c)));
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    return -1;
}

template <typename Word> void shift_left_one(std::span<Word> r, bool in) {
    Word carry = in ? 1 : 0;
    for (Word &w : r) {
        const Word out = Word(w >> (sizeof(Word) * 8 - 1));
        w = Word((w << 1) | carry);
        carry = out;
    }
}

} // namespace

template <typename Word>
BasicBigUint<Word>::BasicBigUint(std::size_t bit_width)
    : words_(round_to_words<Word>(bit_width) / kWordBits, 0),
      bit_width_(round_to_words<Word>(bit_width)) {}

template <typename Word>
BasicBigUint<Word> BasicBigUint<Word>::from_u64(std::uint64_t value,
                                                std::size_t bit_width) {
    const std::size_t needed = std::size_t(std::bit_width(value));
    if (bit_width == 0)
        bit_width = round_to_words<Word>(needed);
    if (needed > bit_width)
        throw DomainError("value does not fit in " +
                          std::to_string(bit_width) + " bits");
    BasicBigUint r(bit_width);
    for (std::size_t i = 0; i < r.words_.size() && value; ++i) {
        r.words_[i] = Word(value);
        value = kWordBits >= 64 ? 0 : value >> kWordBits;
    }
    return r;
}

template <typename Word>
BasicBigUint<Word> BasicBigUint<Word>::from_words(std::span<const Word> words,
                                                  std::size_t bit_width) {
    if (bit_width == 0)
        bit_width = words.size() * kWordBits;
    BasicBigUint r(bit_width);
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i < r.words_.size())
            r.words_[i] = words[i];
        else if (words[i] != 0)
            throw DomainError("value does not fit in " +
                              std::to_string(r.bit_width_) + " bits");
    }
    return r;
}

template <typename Word>
BasicBigUint<Word> BasicBigUint<Word>::from_hex(std::string_view text,
                                                std::size_t bit_width) {
    if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
        text.remove_prefix(2);
    if (text.empty())
        throw ParseError("empty hex string");
    for (char c : text)
        if (hex_value(c) < 0)
            throw ParseError("invalid hex digit '" + std::string(1, c) + "'");

    BasicBigUint r(round_to_words<Word>(4 * text.size()));
    std::size_t bit = 0;
    for (auto it = text.rbegin(); it != text.rend(); ++it, bit += 4) {
        const unsigned v = unsigned(hex_value(*it));
        r.words_[bit / kWordBits] |= Word(v << (bit % kWordBits));
    }
    if (bit_width == 0)
        return r;
    if (r.bit_length() > bit_width)
        throw ParseError("hex value exceeds " + std::to_string(bit_width) +
                         " bits");
    return r.resized(bit_width);
}

template <typename Word>
BasicBigUint<Word>
BasicBigUint<Word>::from_bytes_be(std::span<const std::uint8_t> bytes,
                                  std::size_t bit_width) {
    BasicBigUint r(round_to_words<Word>(8 * bytes.size()));
    std::size_t bit = 0;
    for (auto it = bytes.rbegin(); it != bytes.rend(); ++it, bit += 8)
        for (unsigned b = 0; b < 8; ++b)
            if ((*it >> b) & 1)
                r.set_bit(bit + b);
    if (bit_width == 0)
        return r;
    return r.resized(bit_width);
}

template <typename Word>
BasicBigUint<Word> BasicBigUint<Word>::power_of_two(std::size_t exponent,
                                                    std::size_t bit_width) {
    if (bit_width == 0)
        bit_width = exponent + 1;
    BasicBigUint r(bit_width);
    r.set_bit(exponent);
    return r;
}

template <typename Word> std::string BasicBigUint<Word>::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    const std::size_t nibbles = (bit_length() + 3) / 4;
    if (nibbles == 0)
        return "0";
    std::string s;
    s.reserve(nibbles);
    for (std::size_t i = nibbles; i-- > 0;)
        s.push_back(digits[bits(4 * i, 4)]);
    return s;
}

template <typename Word>
std::vector<std::uint8_t> BasicBigUint<Word>::to_bytes_be() const {
    const std::size_t n = (bit_length() + 7) / 8;
    std::vector<std::uint8_t> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[n - 1 - i] = std::uint8_t(bits(8 * i, 8));
    return out;
}

template <typename Word> bool BasicBigUint<Word>::bit(std::size_t i) const {
    if (i >= bit_width_)
        return false;
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1;
}

template <typename Word>
void BasicBigUint<Word>::set_bit(std::size_t i, bool value) {
    if (i >= bit_width_)
        throw DomainError("bit " + std::to_string(i) + " is outside a " +
                          std::to_string(bit_width_) + "-bit value");
    const Word mask = Word(Word(1) << (i % kWordBits));
    if (value)
        words_[i / kWordBits] |= mask;
    else
        words_[i / kWordBits] &= Word(~mask);
}

template <typename Word>
std::uint64_t BasicBigUint<Word>::bits(std::size_t i, std::size_t count) const {
    if (count > 64)
        throw DomainError("at most 64 bits can be extracted at once");
    std::uint64_t r = 0;
    std::size_t got = 0;
    while (got < count) {
        const std::size_t pos = i + got;
        const std::size_t wi = pos / kWordBits;
        const std::size_t off = pos % kWordBits;
        const std::size_t take = std::min(kWordBits - off, count - got);
        const std::uint64_t chunk =
            (std::uint64_t(word(wi)) >> off) & ((std::uint64_t(1) << take) - 1);
        r |= chunk << got;
        got += take;
    }
    return r;
}

template <typename Word> std::size_t BasicBigUint<Word>::bit_length() const {
    for (std::size_t i = words_.size(); i-- > 0;)
        if (words_[i])
            return i * kWordBits + std::size_t(std::bit_width(words_[i]));
    return 0;
}

template <typename Word> std::size_t BasicBigUint<Word>::popcount() const {
    return detail::popcount_words<Word>(words_);
}

template <typename Word> bool BasicBigUint<Word>::is_zero() const {
    return std::all_of(words_.begin(), words_.end(),
                       [](Word w) { return w == 0; });
}

template <typename Word> std::uint64_t BasicBigUint<Word>::to_u64() const {
    if (bit_length() > 64)
        throw DomainError("value does not fit in 64 bits");
    return bits(0, 64);
}

template <typename Word>
BasicBigUint<Word> BasicBigUint<Word>::resized(std::size_t bit_width) const {
    if (bit_length() > round_to_words<Word>(bit_width))
        throw DomainError("value does not fit in " +
                          std::to_string(round_to_words<Word>(bit_width)) +
                          " bits");
    BasicBigUint r(bit_width);
    const std::size_t n = std::min(words_.size(), r.words_.size());
    std::copy_n(words_.begin(), n, r.words_.begin());
    return r;
}

template <typename Word> bool BasicBigUint<Word>::is_canonical() const {
    return bit_width_ > 0 && bit_width_ % kWordBits == 0 &&
           words_.size() * kWordBits == bit_width_;
}

template <typename Word>
int BasicBigUint<Word>::compare(const BasicBigUint &a, const BasicBigUint &b) {
    return detail::compare_words<Word>(a.words_, b.words_);
}

template <typename Word>
SumWithCarry<Word> add(const BasicBigUint<Word> &a,
                       const BasicBigUint<Word> &b) {
    const std::size_t width = std::max(a.bit_width(), b.bit_width());
    BasicBigUint<Word> r = a.resized(width);
    const Word carry = detail::add_into<Word>(r.words_mut(), b.words());
    return {std::move(r), carry != 0};
}

template <typename Word>
DiffWithBorrow<Word> sub(const BasicBigUint<Word> &a,
                         const BasicBigUint<Word> &b) {
    const std::size_t width = std::max(a.bit_width(), b.bit_width());
    BasicBigUint<Word> r = a.resized(width);
    const Word borrow = detail::sub_from<Word>(r.words_mut(), b.words());
    return {std::move(r), borrow != 0};
}

template <typename Word>
BasicBigUint<Word> shift_left(const BasicBigUint<Word> &a, std::size_t bits) {
    constexpr std::size_t wb = BasicBigUint<Word>::kWordBits;
    BasicBigUint<Word> r(a.bit_width() + bits);
    const std::size_t word_shift = bits / wb;
    const unsigned bit_shift = unsigned(bits % wb);
    auto out = r.words_mut();
    const auto in = a.words();
    for (std::size_t i = 0; i < in.size(); ++i) {
        const std::uint64_t v = std::uint64_t(in[i]) << bit_shift;
        out[i + word_shift] |= Word(v);
        if (bit_shift && i + word_shift + 1 < out.size())
            out[i + word_shift + 1] |= Word(v >> wb);
    }
    return r;
}

template <typename Word>
BasicBigUint<Word> shift_right(const BasicBigUint<Word> &a, std::size_t bits) {
    constexpr std::size_t wb = BasicBigUint<Word>::kWordBits;
    BasicBigUint<Word> r(a.bit_width());
    const std::size_t word_shift = bits / wb;
    const unsigned bit_shift = unsigned(bits % wb);
    auto out = r.words_mut();
    for (std::size_t i = 0; i + word_shift < a.word_count(); ++i) {
        std::uint64_t v = a.word(i + word_shift) >> bit_shift;
        if (bit_shift)
            v |= std::uint64_t(a.word(i + word_shift + 1)) << (wb - bit_shift);
        out[i] = Word(v);
    }
    return r;
}

template <typename Word>
BasicBigUint<Word> shift_right_exact(const BasicBigUint<Word> &a,
                                     std::size_t bits) {
    constexpr std::size_t wb = BasicBigUint<Word>::kWordBits;
    for (std::size_t i = 0; i < bits; i += wb) {
        const std::size_t take = std::min(wb, bits - i);
        if (a.bits(i, take) != 0)
            throw InvariantError("exact shift discards nonzero low bits");
    }
    return shift_right(a, bits);
}

template <typename Word>
BasicBigUint<Word> mul(const BasicBigUint<Word> &a,
                       const BasicBigUint<Word> &b) {
    BasicBigUint<Word> r(a.bit_width() + b.bit_width());
    auto out = r.words_mut();
    const auto bw = b.words();
    for (std::size_t i = 0; i < bw.size(); ++i) {
        if (bw[i] == 0)
            continue;
        detail::mul_add_into<Word>(out.subspan(i), a.words(), bw[i]);
    }
    return r;
}

template <typename Word>
BasicBigUint<Word> mul_word(const BasicBigUint<Word> &a, Word f) {
    BasicBigUint<Word> r(a.bit_width() + BasicBigUint<Word>::kWordBits);
    detail::mul_add_into<Word>(r.words_mut(), a.words(), f);
    return r;
}

template <typename Word>
QuotRem<Word> divmod(const BasicBigUint<Word> &a, const BasicBigUint<Word> &m) {
    if (m.is_zero())
        throw DomainError("division by zero");
    BasicBigUint<Word> q(a.bit_width());
    // One spare word so the doubled remainder never overflows.
    std::vector<Word> rem(m.word_count() + 1, 0);
    const std::span<Word> rs(rem);
    for (std::size_t i = a.bit_length(); i-- > 0;) {
        shift_left_one<Word>(rs, a.bit(i));
        if (detail::compare_words<Word>(rs, m.words()) >= 0) {
            detail::sub_from<Word>(rs, m.words());
            q.set_bit(i);
        }
    }
    return {std::move(q), BasicBigUint<Word>::from_words(
                              rs.first(m.word_count()), m.bit_width())};
}

template <typename Word>
BasicBigUint<Word> mod_reduce(const BasicBigUint<Word> &a,
                              const BasicBigUint<Word> &m) {
    return divmod(a, m).remainder;
}

template <typename Word>
Word neg_inv_mod_pow2(const BasicBigUint<Word> &m, unsigned bits) {
    if (!m.is_odd())
        throw DomainError("inverse modulo a power of two needs an odd value");
    if (bits == 0 || bits > BasicBigUint<Word>::kWordBits)
        throw DomainError("inverse width must be between 1 and the word size");
    const std::uint64_t m0 = m.word(0);
    // 1 is the inverse mod 2; each Newton step doubles the valid low bits.
    std::uint64_t inv = 1;
    for (unsigned valid = 1; valid < bits; valid *= 2)
        inv *= 2 - m0 * inv;
    const std::uint64_t mask =
        bits == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << bits) - 1;
    return Word((0 - inv) & mask);
}

template <typename Word>
std::size_t hamming_distance(const BasicBigUint<Word> &a,
                             const BasicBigUint<Word> &b) {
    return detail::hamming_words<Word>(a.words(), b.words());
}

template <typename Word>
BasicBigUint<Word> gcd(BasicBigUint<Word> a, BasicBigUint<Word> b) {
    const std::size_t width = std::max(a.bit_width(), b.bit_width());
    a = a.resized(width);
    b = b.resized(width);
    if (a.is_zero())
        return b;
    if (b.is_zero())
        return a;
    std::size_t shift = 0;
    while (!a.is_odd() && !b.is_odd()) {
        a = shift_right(a, 1);
        b = shift_right(b, 1);
        ++shift;
    }
    while (!a.is_odd())
        a = shift_right(a, 1);
    while (!b.is_zero()) {
        while (!b.is_odd())
            b = shift_right(b, 1);
        if (a > b)
            std::swap(a, b);
        b = sub(b, a).value;
    }
    return shift_left(a, shift).resized(width);
}

#define MONTLAB_BIGINT_INSTANTIATE(W)                                          \
    template class BasicBigUint<W>;                                            \
    template SumWithCarry<W> add(const BasicBigUint<W> &,                      \
                                 const BasicBigUint<W> &);                     \
    template DiffWithBorrow<W> sub(const BasicBigUint<W> &,                    \
                                   const BasicBigUint<W> &);                   \
    template BasicBigUint<W> shift_left(const BasicBigUint<W> &, std::size_t); \
    template BasicBigUint<W> shift_right(const BasicBigUint<W> &,              \
                                         std::size_t);                         \
    template BasicBigUint<W> shift_right_exact(const BasicBigUint<W> &,        \
                                               std::size_t);                   \
    template BasicBigUint<W> mul(const BasicBigUint<W> &,                      \
                                 const BasicBigUint<W> &);                     \
    template BasicBigUint<W> mul_word(const BasicBigUint<W> &, W);             \
    template QuotRem<W> divmod(const BasicBigUint<W> &,                        \
                               const BasicBigUint<W> &);                       \
    template BasicBigUint<W> mod_reduce(const BasicBigUint<W> &,               \
                                        const BasicBigUint<W> &);              \
    template W neg_inv_mod_pow2(const BasicBigUint<W> &, unsigned);            \
    template std::size_t hamming_distance(const BasicBigUint<W> &,             \
                                          const BasicBigUint<W> &);            \
    template BasicBigUint<W> gcd(BasicBigUint<W>, BasicBigUint<W>);

MONTLAB_BIGINT_INSTANTIATE(std::uint8_t)
MONTLAB_BIGINT_INSTANTIATE(std::uint16_t)
MONTLAB_BIGINT_INSTANTIATE(std::uint32_t)

} // namespace montlab
