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

#include "montlab/bigint.h"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace montlab {

/// Geometry of the k-partition multiplier.
///
/// The multiplier x is consumed word_radix_bits() = partitions_k * digit_bits
/// bits per iteration. Within each such word, partition j owns the digit slot
/// at bit offset digit_bits * j, so the k cores together cover the whole word
/// (the interleaving of the quad-core design: X_m[1:0] to core 0, X_m[3:2] to
/// core 1, ...). Each core therefore runs n / word_radix_bits() iterations.
struct ParallelConfig {
    unsigned partitions_k = 4;
    unsigned digit_bits = 2;
    /// Run the partitions on separate threads inside mont_parallel.
    bool concurrent = false;

    unsigned word_radix_bits() const { return partitions_k * digit_bits; }

    /// Loop iterations per partition for an n-bit Montgomery block.
    std::size_t iterations(std::size_t n) const { return n / word_radix_bits(); }

    /// Throws DomainError naming the violated constraint.
    void validate() const;
    /// As validate(), and additionally requires word_radix_bits() to divide n.
    void validate(std::size_t n) const;
};

/// Precomputed parameters for Montgomery arithmetic modulo one odd modulus.
class MontContext {
  public:
    /// R = 2^n. Requires m odd, 0 < m < 2^n, and word_radix_bits (at most 32,
    /// a power of two) dividing n.
    MontContext(const BigUint &modulus, std::size_t n,
                unsigned word_radix_bits = 8);

    /// Picks n as the modulus length rounded up to whole 32-bit words.
    static MontContext for_modulus(const BigUint &modulus,
                                   unsigned word_radix_bits = 8);

    const BigUint &modulus() const { return m_; }
    std::size_t n() const { return n_; }
    /// 2^(2n) mod m, the mapping constant.
    const BigUint &r2_mod_m() const { return r2_; }
    unsigned word_radix_bits() const { return w_; }
    /// -m^-1 mod 2^word_radix_bits().
    std::uint32_t m_prime() const { return m_prime(w_); }
    /// -m^-1 mod 2^bits, for any bits <= 32.
    std::uint32_t m_prime(unsigned bits) const;
    /// Width of every residue produced with this context.
    std::size_t operand_bits() const { return m_.bit_width(); }

  private:
    BigUint m_;
    std::size_t n_;
    unsigned w_;
    std::uint32_t m_prime32_;
    BigUint r2_;
};

/// Instrumentation filled in by the Montgomery routines.
struct MontStats {
    /// Loop iterations executed (per partition for the parallel variants).
    std::size_t iterations = 0;
    std::size_t partitions = 0;
    /// Subtractions of m after recombining the partial products.
    std::size_t final_subtractions = 0;
};

/// Bit-serial reference: z = x*y*2^-n mod m, one multiplier bit per step.
BigUint mont_radix2(const BigUint &x, const BigUint &y, const MontContext &ctx,
                    MontStats *stats = nullptr);

/// Word-radix Montgomery: ctx.word_radix_bits() multiplier bits per step.
BigUint mont_word(const BigUint &x, const BigUint &y, const MontContext &ctx,
                  MontStats *stats = nullptr);

/// The limited digit set of partition j: {0, y, 2y, ...,(2^d - 1)y}, each
/// shifted left by digit_bits * j. For the default 2-bit digits these are the
/// four mux inputs Y00, Y01, Y10, Y11.
std::vector<BigUint> precompute_digit_multiples(const BigUint &y, std::size_t j,
                                                const ParallelConfig &cfg);

/// X_Pj: the bits of x that belong to partition j, left in place.
BigUint partition_multiplier(const BigUint &x, std::size_t j,
                             const ParallelConfig &cfg, std::size_t n);

/// Partial product of partition j: X_Pj * y * 2^-n mod m, fully reduced.
BigUint mmp_partition(std::size_t j, const BigUint &x, const BigUint &y,
                      const MontContext &ctx, const ParallelConfig &cfg,
                      MontStats *stats = nullptr);

/// Runs every partition and recombines: the sum of the k partial products,
/// reduced below m with at most k - 1 subtractions. Partials are summed in
/// ascending j, so the result does not depend on scheduling.
BigUint mont_parallel(const BigUint &x, const BigUint &y, const MontContext &ctx,
                      const ParallelConfig &cfg, MontStats *stats = nullptr);

/// One partition's datapath: an accumulator register updated once per
/// iteration from a multiplier digit. Used by mmp_partition and by the
/// cycle-level simulator.
class PartitionCore {
  public:
    PartitionCore(const MontContext &ctx, const ParallelConfig &cfg,
                  std::size_t index);

    /// Latch the multiplicand and clear the accumulator.
    void start(const BigUint &y);
    /// Clear the accumulator, keeping the latched multiplicand.
    void clear();

    /// s <- (s + digit*y*2^(d*j) + q*m) / 2^w with q chosen so the division
    /// is exact. Throws InvariantError if that ever fails.
    void step(std::uint32_t digit);

    /// Raw accumulator S_Pj (below 2m between steps).
    const BigUint &accumulator() const { return acc_; }
    /// Accumulator reduced below m by one conditional subtraction.
    BigUint partial_product() const;

    std::size_t index() const { return index_; }
    std::size_t iterations() const { return iterations_; }
    /// Declared width of the accumulator register.
    std::size_t accumulator_bits() const { return acc_bits_; }

  private:
    BigUint m_;
    std::size_t n_;
    std::size_t index_;
    unsigned digit_bits_;
    unsigned w_;
    std::uint32_t mask_;
    std::uint32_t m_prime_;
    std::size_t acc_bits_;
    std::vector<BigUint> multiples_; // digit table, digit_bits <= 4
    BigUint shifted_y_;              // y << d*j, wider digits
    BigUint acc_;
    std::size_t iterations_ = 0;
};

/// In-place s := s - m while s >= m, at most max_subtractions times; returns
/// the number performed. Uses the branchless form when the library is built
/// with MONTLAB_CONSTANT_TIME. Throws InvariantError if s is still >= m.
std::size_t reduce_below(BigUint &s, const BigUint &m,
                         std::size_t max_subtractions);

} // namespace montlab
