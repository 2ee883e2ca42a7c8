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
#include "montlab/montgomery.h"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace montlab::rsa {

struct RsaPublicKey {
    BigUint modulus;
    BigUint exponent;

    /// Modulus odd, 3 <= exponent < modulus. Throws DomainError.
    void validate() const;
};

struct RsaPrivateKey {
    BigUint modulus;
    BigUint public_exponent;
    BigUint d;
    std::optional<BigUint> p;
    std::optional<BigUint> q;

    /// d < modulus, and p * q == modulus when the factors are present.
    void validate() const;
    RsaPublicKey public_key() const { return {modulus, public_exponent}; }
};

struct RsaKeyPair {
    RsaPublicKey public_key;
    RsaPrivateKey private_key;
};

/// Registers of the right-to-left exponentiation, in the Montgomery domain.
struct ExpState {
    BigUint p_acc; ///< running square P
    BigUint r_acc; ///< running result R
    std::size_t bit_index = 0;
};

/// The five Montgomery operation kinds of the exponentiation schedule.
enum class ExpOp {
    MapPlaintext, ///< P = Mont(C, P)
    MapOne,       ///< R = Mont(C, 1)
    Multiply,     ///< R = Mont(R, P), on set exponent bits
    Square,       ///< P = Mont(P, P), every bit
    Remap,        ///< R = Mont(1, R)
};

const char *to_string(ExpOp op);

/// Called after every Montgomery operation with the updated registers.
using ExpObserver = std::function<void(ExpOp, const ExpState &)>;

struct ModExpResult {
    BigUint value;
    std::size_t mont_ops = 0;
};

/// x^d mod n by left-to-right square-and-multiply with plain reductions.
/// Throws DomainError for n <= 1.
BigUint mod_exp_naive(const BigUint &x, const BigUint &d, const BigUint &n);

/// a * 2^n mod m, computed as Mont(a, 2^2n mod m).
BigUint to_mont(const BigUint &a, const MontContext &ctx,
                const ParallelConfig &cfg = {});
/// a_bar * 2^-n mod m, computed as Mont(a_bar, 1).
BigUint from_mont(const BigUint &a_bar, const MontContext &ctx,
                  const ParallelConfig &cfg = {});

/// Montgomery operations used by mod_exp_mont for exponent e: two mappings,
/// one square per exponent bit, one multiply per set bit, one remapping.
std::size_t mont_op_count(const BigUint &e);

/// p^e mod m by the right-to-left binary method on Montgomery residues.
/// Exponent bits are scanned from the least significant one; the square
/// after the last bit is still performed, as in the hardware schedule.
ModExpResult mod_exp_mont(const BigUint &p, const BigUint &e,
                          const MontContext &ctx, const ParallelConfig &cfg = {},
                          const ExpObserver &observer = {});

BigUint encrypt(const BigUint &msg, const RsaPublicKey &key,
                const ParallelConfig &cfg = {});
BigUint decrypt(const BigUint &ct, const RsaPrivateKey &key,
                const ParallelConfig &cfg = {});

/// Raw message bytes (big-endian) as an integer below the modulus.
BigUint message_from_bytes(std::span<const std::uint8_t> bytes,
                           const RsaPublicKey &key);

/// A value of exactly `bits` random bits (the top bit may be clear).
BigUint random_bits(std::mt19937_64 &rng, std::size_t bits);

/// Miller-Rabin with `rounds` random bases.
bool is_probable_prime(const BigUint &n, unsigned rounds, std::mt19937_64 &rng);

/// Deterministic toy key generation: two bits/2-bit Miller-Rabin primes
/// (20 rounds), e = 65537 (17 below 32 bits), d = e^-1 mod lcm(p-1, q-1).
/// bits must be even and in [16, 2048]. Throws KeygenError if no prime is
/// found within the attempt budget.
RsaKeyPair keygen_toy(std::size_t bits, std::uint64_t seed);

/// Key files: one `name=<hex>` per line. Public files carry n and e; private
/// files add d and optionally p and q. Blank lines and '#' comments are
/// ignored.
std::string format_public_key(const RsaPublicKey &key);
std::string format_private_key(const RsaPrivateKey &key);
RsaPublicKey parse_public_key(std::string_view text);
RsaPrivateKey parse_private_key(std::string_view text);

RsaPublicKey read_public_key(const std::string &path);
RsaPrivateKey read_private_key(const std::string &path);
void write_text_file(const std::string &path, const std::string &contents);

} // namespace montlab::rsa
