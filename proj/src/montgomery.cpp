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

#include "montlab/montgomery.h"
#include "montlab/detail/limbs.h"
#include "montlab/errors.h"

#include <algorithm>
#include <bit>
#include <future>
#include <span>
#include <string>
#include <vector>

namespace montlab {

namespace {

bool is_supported_radix(unsigned bits) {
    return bits >= 1 && bits <= 32 && std::has_single_bit(bits);
}

void check_operands(const BigUint &x, const BigUint &y, const MontContext &ctx) {
    if (x >= ctx.modulus() || y >= ctx.modulus())
        throw DomainError("Montgomery operands must be below the modulus");
}

// Single conditional subtraction for a value known to be below 2m.
void subtract_if_not_below(BigUint &s, const BigUint &m) {
    reduce_below(s, m, 1);
}

// Shift a word span left by fewer than 32 bits in place.
void shift_left_small(std::span<std::uint32_t> r, unsigned bits) {
    if (bits == 0)
        return;
    for (std::size_t i = r.size(); i-- > 1;)
        r[i] = (r[i] << bits) | (r[i - 1] >> (32 - bits));
    r[0] <<= bits;
}

// mont_parallel without threads: the PartitionCore update for every
// partition, with all accumulators and digit tables in one buffer so a call
// costs a couple of allocations rather than a few per partition.
BigUint mont_parallel_sequential(const BigUint &x, const BigUint &y,
                                 const MontContext &ctx,
                                 const ParallelConfig &cfg, MontStats *stats) {
    const BigUint &m = ctx.modulus();
    const std::span<const std::uint32_t> mw = m.words();
    const std::size_t words = mw.size();
    const std::size_t k = cfg.partitions_k;
    const unsigned d = cfg.digit_bits;
    const unsigned w = cfg.word_radix_bits();
    const std::uint32_t mask =
        w == 32 ? ~std::uint32_t(0) : (std::uint32_t(1) << w) - 1;
    const std::uint32_t m_prime = ctx.m_prime(w);
    const std::size_t t = cfg.iterations(ctx.n());

    // Before the shift an accumulator is below 2^(n+w+2); a table entry
    // (digit * y * 2^(d*j)) is below 2^(n+w).
    const std::size_t acc_words = words + 2;
    const std::size_t entry_words = words + 1;
    const std::size_t entries = d <= 4 ? std::size_t(1) << d : 1;
    std::vector<std::uint32_t> buf(k * acc_words +
                                   k * entries * entry_words + acc_words);
    auto acc = [&](std::size_t j) {
        return std::span<std::uint32_t>(buf.data() + j * acc_words, acc_words);
    };
    auto entry = [&](std::size_t j, std::size_t v) {
        return std::span<std::uint32_t>(
            buf.data() + k * acc_words + (j * entries + v) * entry_words,
            entry_words);
    };
    const std::span<std::uint32_t> scratch(buf.data() + buf.size() - acc_words,
                                           acc_words);

    const auto yw = y.words();
    for (std::size_t j = 0; j < k; ++j) {
        const auto base = entry(j, d <= 4 ? 1 : 0);
        std::copy_n(yw.begin(), std::min(yw.size(), words), base.begin());
        shift_left_small(base, unsigned(d * j));
        for (std::size_t v = 2; v < entries; ++v) {
            const auto e = entry(j, v);
            std::copy(entry(j, v - 1).begin(), entry(j, v - 1).end(), e.begin());
            detail::add_into<std::uint32_t>(e, base);
        }
    }

    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const auto s = acc(j);
            const auto digit = std::uint32_t(x.bits(w * i + d * j, d));
            std::uint32_t carry =
                d <= 4 ? detail::add_into<std::uint32_t>(s, entry(j, digit))
                       : detail::mul_add_into<std::uint32_t>(s, entry(j, 0),
                                                             digit);
            const std::uint32_t q = (s[0] * m_prime) & mask;
            carry |= detail::mul_add_into<std::uint32_t>(s, mw, q);
            if (carry || (s[0] & mask) != 0)
                throw InvariantError("partition accumulator is not divisible "
                                     "by the word radix");
            detail::shift_right_small<std::uint32_t>(s, w);
        }
    }

    BigUint sum(ctx.operand_bits() + 32);
    for (std::size_t j = 0; j < k; ++j) {
        const auto s = acc(j);
#ifdef MONTLAB_CONSTANT_TIME
        detail::conditional_subtract_branchless<std::uint32_t>(s, mw, scratch);
#else
        if (detail::compare_words<std::uint32_t>(s, mw) >= 0)
            detail::sub_from<std::uint32_t>(s, mw);
#endif
        if (detail::compare_words<std::uint32_t>(s, mw) >= 0)
            throw InvariantError("partial product is not below the modulus");
        detail::add_into<std::uint32_t>(sum.words_mut(), s.first(words));
    }
    (void)scratch;
    const std::size_t subtractions = reduce_below(sum, m, k > 1 ? k - 1 : 1);
    if (stats) {
        stats->iterations = t;
        stats->partitions = k;
        stats->final_subtractions = subtractions;
    }
    return sum.resized(ctx.operand_bits());
}

} // namespace

void ParallelConfig::validate() const {
    if (partitions_k == 0)
        throw DomainError("partitions_k must be at least 1");
    if (!is_supported_radix(digit_bits))
        throw DomainError("digit_bits must be one of 1, 2, 4, 8, 16, 32");
    if (!is_supported_radix(word_radix_bits()))
        throw DomainError("partitions_k * digit_bits must be a power of two "
                          "no larger than 32 (got " +
                          std::to_string(word_radix_bits()) + ")");
}

void ParallelConfig::validate(std::size_t n) const {
    validate();
    if (n == 0 || n % word_radix_bits() != 0)
        throw DomainError("word radix " + std::to_string(word_radix_bits()) +
                          " bits must divide the block size n = " +
                          std::to_string(n));
}

MontContext::MontContext(const BigUint &modulus, std::size_t n,
                         unsigned word_radix_bits)
    : n_(n), w_(word_radix_bits) {
    if (!modulus.is_odd())
        throw DomainError("Montgomery modulus must be odd");
    if (n == 0 || modulus.bit_length() > n)
        throw DomainError("modulus must be below 2^n (n = " +
                          std::to_string(n) + ")");
    if (!is_supported_radix(word_radix_bits) || n % word_radix_bits != 0)
        throw DomainError("word radix must be a power of two up to 32 that "
                          "divides n");
    m_ = modulus.resized(round_to_words<std::uint32_t>(n));
    m_prime32_ = neg_inv_mod_pow2(m_, 32);
    r2_ = mod_reduce(BigUint::power_of_two(2 * n), m_);
}

MontContext MontContext::for_modulus(const BigUint &modulus,
                                     unsigned word_radix_bits) {
    return MontContext(modulus,
                       round_to_words<std::uint32_t>(modulus.bit_length()),
                       word_radix_bits);
}

std::uint32_t MontContext::m_prime(unsigned bits) const {
    if (bits == 0 || bits > 32)
        throw DomainError("m' width must be between 1 and 32 bits");
    return bits == 32 ? m_prime32_
                      : m_prime32_ & ((std::uint32_t(1) << bits) - 1);
}

std::size_t reduce_below(BigUint &s, const BigUint &m,
                         std::size_t max_subtractions) {
    std::size_t done = 0;
#ifdef MONTLAB_CONSTANT_TIME
    std::vector<std::uint32_t> scratch(s.word_count());
    for (; done < max_subtractions; ++done)
        detail::conditional_subtract_branchless<std::uint32_t>(
            s.words_mut(), m.words(), scratch);
#else
    while (done < max_subtractions && s >= m) {
        detail::sub_from<std::uint32_t>(s.words_mut(), m.words());
        ++done;
    }
#endif
    if (s >= m)
        throw InvariantError("value still exceeds the modulus after " +
                             std::to_string(max_subtractions) +
                             " subtractions");
    return done;
}

BigUint mont_radix2(const BigUint &x, const BigUint &y, const MontContext &ctx,
                    MontStats *stats) {
    check_operands(x, y, ctx);
    const BigUint &m = ctx.modulus();
    const std::size_t width = ctx.operand_bits() + 32;
    const BigUint yw = y.resized(width);
    BigUint s(width);
    for (std::size_t i = 0; i < ctx.n(); ++i) {
        BigUint a = x.bit(i) ? add(s, yw).value : s;
        if (a.is_odd())
            a = add(a, m).value;
        s = shift_right_exact(a, 1);
    }
    subtract_if_not_below(s, m);
    if (stats) {
        stats->iterations = ctx.n();
        stats->partitions = 1;
        stats->final_subtractions = 0;
    }
    return s.resized(ctx.operand_bits());
}

BigUint mont_word(const BigUint &x, const BigUint &y, const MontContext &ctx,
                  MontStats *stats) {
    check_operands(x, y, ctx);
    const BigUint &m = ctx.modulus();
    const unsigned w = ctx.word_radix_bits();
    const std::uint64_t mask = (std::uint64_t(1) << w) - 1;
    const std::uint64_t m_prime = ctx.m_prime();
    const std::size_t width = ctx.operand_bits() + 64;
    const std::size_t t = ctx.n() / w;

    BigUint s(width);
    for (std::size_t i = 0; i < t; ++i) {
        const auto digit = std::uint32_t(x.bits(w * i, w));
        BigUint a = add(s, mul_word(y, digit)).value;
        const auto q = std::uint32_t((a.bits(0, w) * m_prime) & mask);
        a = add(a, mul_word(m, q)).value;
        s = shift_right_exact(a, w);
    }
    subtract_if_not_below(s, m);
    if (stats) {
        stats->iterations = t;
        stats->partitions = 1;
        stats->final_subtractions = 0;
    }
    return s.resized(ctx.operand_bits());
}

std::vector<BigUint> precompute_digit_multiples(const BigUint &y, std::size_t j,
                                                const ParallelConfig &cfg) {
    cfg.validate();
    if (cfg.digit_bits > 4)
        throw DomainError("digit tables are limited to digits of at most 4 bits");
    if (j >= cfg.partitions_k)
        throw DomainError("partition index out of range");
    const std::size_t count = std::size_t(1) << cfg.digit_bits;
    // (2^d - 1) * 2^(d*j) < 2^(d*(j+1)), so every entry fits this width.
    const std::size_t width = round_to_words<std::uint32_t>(
        y.bit_width() + std::size_t(cfg.digit_bits) * (j + 1));
    const BigUint base = shift_left(y, cfg.digit_bits * j).resized(width);

    // 2y is a shift; every odd multiple is one addition on the previous entry.
    std::vector<BigUint> table;
    table.reserve(count);
    table.emplace_back(width);
    for (std::size_t v = 1; v < count; ++v) {
        if (v % 2 == 0)
            table.push_back(shift_left(table[v / 2], 1).resized(width));
        else
            table.push_back(add(table[v - 1], base).value);
    }
    return table;
}

BigUint partition_multiplier(const BigUint &x, std::size_t j,
                             const ParallelConfig &cfg, std::size_t n) {
    cfg.validate(n);
    if (j >= cfg.partitions_k)
        throw DomainError("partition index out of range");
    const unsigned w = cfg.word_radix_bits();
    BigUint r(x.bit_width());
    for (std::size_t i = 0; i < n / w; ++i)
        for (unsigned b = 0; b < cfg.digit_bits; ++b) {
            const std::size_t pos = w * i + cfg.digit_bits * j + b;
            if (x.bit(pos))
                r.set_bit(pos);
        }
    return r;
}

PartitionCore::PartitionCore(const MontContext &ctx, const ParallelConfig &cfg,
                             std::size_t index)
    : m_(ctx.modulus()), n_(ctx.n()), index_(index),
      digit_bits_(cfg.digit_bits), w_(cfg.word_radix_bits()),
      mask_(w_ == 32 ? ~std::uint32_t(0) : (std::uint32_t(1) << w_) - 1),
      m_prime_(ctx.m_prime(w_)), acc_bits_(n_ + w_ + 2),
      acc_(round_to_words<std::uint32_t>(acc_bits_) + 32) {
    cfg.validate(ctx.n());
    if (index >= cfg.partitions_k)
        throw DomainError("partition index out of range");
}

void PartitionCore::start(const BigUint &multiplicand) {
    const BigUint y = multiplicand.resized(m_.bit_width());
    if (digit_bits_ <= 4) {
        ParallelConfig cfg;
        cfg.partitions_k = w_ / digit_bits_;
        cfg.digit_bits = digit_bits_;
        multiples_ = precompute_digit_multiples(y, index_, cfg);
    } else {
        shifted_y_ = shift_left(y, std::size_t(digit_bits_) * index_);
    }
    clear();
}

void PartitionCore::clear() {
    for (auto &w : acc_.words_mut())
        w = 0;
    iterations_ = 0;
}

void PartitionCore::step(std::uint32_t digit) {
    const auto s = acc_.words_mut();
    std::uint32_t carry;
    if (digit_bits_ <= 4) {
        carry = detail::add_into<std::uint32_t>(s, multiples_.at(digit).words());
    } else {
        carry = detail::mul_add_into<std::uint32_t>(s, shifted_y_.words(), digit);
    }
    const std::uint32_t q = (s[0] * m_prime_) & mask_;
    carry |= detail::mul_add_into<std::uint32_t>(s, m_.words(), q);
    if (carry || (s[0] & mask_) != 0)
        throw InvariantError("partition accumulator is not divisible by the "
                             "word radix");
    detail::shift_right_small<std::uint32_t>(s, w_);
    if (acc_.bit_length() > acc_bits_)
        throw InvariantError("partition accumulator exceeded its bound");
    ++iterations_;
}

BigUint PartitionCore::partial_product() const {
    BigUint r = acc_;
    subtract_if_not_below(r, m_);
    return r.resized(m_.bit_width());
}

BigUint mmp_partition(std::size_t j, const BigUint &x, const BigUint &y,
                      const MontContext &ctx, const ParallelConfig &cfg,
                      MontStats *stats) {
    check_operands(x, y, ctx);
    PartitionCore core(ctx, cfg, j);
    core.start(y);
    const unsigned w = cfg.word_radix_bits();
    const std::size_t offset = std::size_t(cfg.digit_bits) * j;
    const std::size_t t = cfg.iterations(ctx.n());
    for (std::size_t i = 0; i < t; ++i)
        core.step(std::uint32_t(x.bits(w * i + offset, cfg.digit_bits)));
    if (stats) {
        stats->iterations = core.iterations();
        stats->partitions = 1;
        stats->final_subtractions = 0;
    }
    return core.partial_product();
}

BigUint mont_parallel(const BigUint &x, const BigUint &y, const MontContext &ctx,
                      const ParallelConfig &cfg, MontStats *stats) {
    check_operands(x, y, ctx);
    cfg.validate(ctx.n());
    const std::size_t k = cfg.partitions_k;

    if (!cfg.concurrent || k == 1)
        return mont_parallel_sequential(x, y, ctx, cfg, stats);

    std::vector<BigUint> partials(k);
    std::vector<MontStats> part_stats(k);
    {
        std::vector<std::future<BigUint>> jobs;
        jobs.reserve(k);
        for (std::size_t j = 0; j < k; ++j)
            jobs.push_back(std::async(std::launch::async, [&, j] {
                return mmp_partition(j, x, y, ctx, cfg, &part_stats[j]);
            }));
        for (std::size_t j = 0; j < k; ++j)
            partials[j] = jobs[j].get();
    }

    // Each partial is below m, so the sum stays below k*m.
    BigUint sum(ctx.operand_bits() + 32);
    for (const BigUint &p : partials)
        detail::add_into<std::uint32_t>(sum.words_mut(), p.words());
    const std::size_t subtractions =
        reduce_below(sum, ctx.modulus(), k > 1 ? k - 1 : 1);

    if (stats) {
        stats->iterations = part_stats[0].iterations;
        stats->partitions = k;
        stats->final_subtractions = subtractions;
    }
    return sum.resized(ctx.operand_bits());
}

} // namespace montlab
