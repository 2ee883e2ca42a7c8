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

// Word-level kernels shared by the big-integer and Montgomery code. All of
// them operate in place on little-endian word spans and use 64-bit
// intermediates, so Word may be any unsigned type up to 32 bits.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>

namespace montlab::detail {

template <typename Word> constexpr unsigned word_bits() {
    return sizeof(Word) * 8;
}

/// r += a, where r.size() >= a.size(). Returns the carry out of r.
template <typename Word>
Word add_into(std::span<Word> r, std::span<const Word> a) {
    std::uint64_t carry = 0;
    std::size_t i = 0;
    for (; i < a.size(); ++i) {
        carry += std::uint64_t(r[i]) + a[i];
        r[i] = Word(carry);
        carry >>= word_bits<Word>();
    }
    for (; carry && i < r.size(); ++i) {
        carry += r[i];
        r[i] = Word(carry);
        carry >>= word_bits<Word>();
    }
    return Word(carry);
}

/// r -= a, where r.size() >= a.size(). Returns the borrow out of r.
template <typename Word>
Word sub_from(std::span<Word> r, std::span<const Word> a) {
    std::uint64_t borrow = 0;
    std::size_t i = 0;
    for (; i < a.size(); ++i) {
        const std::uint64_t d = std::uint64_t(r[i]) - a[i] - borrow;
        r[i] = Word(d);
        borrow = (d >> 63) & 1;
    }
    for (; borrow && i < r.size(); ++i) {
        const std::uint64_t d = std::uint64_t(r[i]) - borrow;
        r[i] = Word(d);
        borrow = (d >> 63) & 1;
    }
    return Word(borrow);
}

/// r += a * f. Returns the carry out of r.
template <typename Word>
Word mul_add_into(std::span<Word> r, std::span<const Word> a, Word f) {
    std::uint64_t carry = 0;
    std::size_t i = 0;
    for (; i < a.size(); ++i) {
        const std::uint64_t t = std::uint64_t(a[i]) * f + r[i] + carry;
        r[i] = Word(t);
        carry = t >> word_bits<Word>();
    }
    for (; carry && i < r.size(); ++i) {
        carry += r[i];
        r[i] = Word(carry);
        carry >>= word_bits<Word>();
    }
    return Word(carry);
}

/// Three-way compare of equal-length word spans, most significant first.
template <typename Word>
int compare_words(std::span<const Word> a, std::span<const Word> b) {
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = n; i-- > 0;) {
        const Word x = i < a.size() ? a[i] : Word(0);
        const Word y = i < b.size() ? b[i] : Word(0);
        if (x != y)
            return x < y ? -1 : 1;
    }
    return 0;
}

/// r >>= bits, 0 < bits <= word size. Vacated high bits become zero.
template <typename Word>
void shift_right_small(std::span<Word> r, unsigned bits) {
    constexpr unsigned wb = word_bits<Word>();
    if (r.empty())
        return;
    if (bits == wb) {
        std::copy(r.begin() + 1, r.end(), r.begin());
        r.back() = 0;
        return;
    }
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        r[i] = Word((r[i] >> bits) | (std::uint64_t(r[i + 1]) << (wb - bits)));
    r.back() = Word(r.back() >> bits);
}

template <typename Word>
std::size_t popcount_words(std::span<const Word> a) {
    std::size_t n = 0;
    for (Word w : a)
        n += std::popcount(w);
    return n;
}

/// Number of differing bits; the shorter span is zero-extended.
template <typename Word>
std::size_t hamming_words(std::span<const Word> a, std::span<const Word> b) {
    std::size_t n = 0;
    const std::size_t len = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < len; ++i) {
        const Word x = i < a.size() ? a[i] : Word(0);
        const Word y = i < b.size() ? b[i] : Word(0);
        n += std::popcount(Word(x ^ y));
    }
    return n;
}

/// If r >= m (as numbers) replace r by r - m, without branching on the data.
/// m.size() <= r.size(); scratch must hold r.size() words.
template <typename Word>
void conditional_subtract_branchless(std::span<Word> r, std::span<const Word> m,
                                     std::span<Word> scratch) {
    std::copy(r.begin(), r.end(), scratch.begin());
    const Word borrow = sub_from<Word>(scratch.first(r.size()), m);
    const Word keep = Word(0) - borrow; // all ones when r < m
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = Word((r[i] & keep) | (scratch[i] & Word(~keep)));
}

} // namespace montlab::detail
