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

#include "montlab/rsa.h"
#include "montlab/errors.h"

#include <array>
#include <string>
#include <tuple>
#include <utility>

namespace montlab::rsa {

namespace {

std::uint32_t mod_small(const BigUint &a, std::uint32_t m) {
    std::uint64_t r = 0;
    for (std::size_t i = a.word_count(); i-- > 0;)
        r = ((r << 32) | a.word(i)) % m;
    return std::uint32_t(r);
}

// Modular inverse for word-sized values, extended Euclid. Requires gcd 1.
std::uint32_t inverse_small(std::uint32_t a, std::uint32_t m) {
    std::int64_t old_r = a, r = m, old_s = 1, s = 0;
    while (r != 0) {
        const std::int64_t q = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    }
    if (old_r != 1)
        throw DomainError("value is not invertible");
    return std::uint32_t(((old_s % m) + m) % m);
}

constexpr std::array<std::uint32_t, 24> kSmallPrimes = {
    3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
    43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

BigUint mont(const BigUint &x, const BigUint &y, const MontContext &ctx,
             const ParallelConfig &cfg) {
    return mont_parallel(x, y, ctx, cfg);
}

BigUint random_prime(std::size_t bits, std::uint32_t e, std::mt19937_64 &rng) {
    const std::size_t attempts = 100 * bits + 1000;
    for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
        BigUint c = random_bits(rng, bits);
        // Two top bits set so the product of two such primes has 2*bits bits.
        c.set_bit(bits - 1);
        c.set_bit(bits - 2);
        c.set_bit(0);
        if (mod_small(c, e) == 1)
            continue; // e must be coprime to c - 1
        // Candidates are at least 2^(bits-1) > 97, so none is a small prime.
        bool composite = false;
        for (std::uint32_t sp : kSmallPrimes)
            if (mod_small(c, sp) == 0) {
                composite = true;
                break;
            }
        if (composite)
            continue;
        if (is_probable_prime(c, 20, rng))
            return c;
    }
    throw KeygenError("no " + std::to_string(bits) + "-bit prime found in " +
                      std::to_string(attempts) + " attempts");
}

} // namespace

const char *to_string(ExpOp op) {
    switch (op) {
    case ExpOp::MapPlaintext:
        return "map-plaintext";
    case ExpOp::MapOne:
        return "map-one";
    case ExpOp::Multiply:
        return "multiply";
    case ExpOp::Square:
        return "square";
    case ExpOp::Remap:
        return "remap";
    }
    return "?";
}

void RsaPublicKey::validate() const {
    if (!modulus.is_odd())
        throw DomainError("RSA modulus must be odd");
    if (exponent < BigUint::from_u64(3))
        throw DomainError("public exponent must be at least 3");
    if (exponent >= modulus)
        throw DomainError("public exponent must be below the modulus");
}

void RsaPrivateKey::validate() const {
    if (!modulus.is_odd())
        throw DomainError("RSA modulus must be odd");
    if (d >= modulus)
        throw DomainError("private exponent must be below the modulus");
    if (p.has_value() != q.has_value())
        throw DomainError("both prime factors or neither must be given");
    if (p && mul(*p, *q) != modulus)
        throw DomainError("p * q does not equal the modulus");
}

BigUint mod_exp_naive(const BigUint &x, const BigUint &d, const BigUint &n) {
    if (n <= BigUint::from_u64(1))
        throw DomainError("modulus must be greater than 1");
    const BigUint base = mod_reduce(x, n);
    if (d.is_zero())
        return BigUint::from_u64(1, n.bit_width());
    BigUint s = base;
    for (std::size_t i = d.bit_length() - 1; i-- > 0;) {
        s = mod_reduce(mul(s, s), n);
        if (d.bit(i))
            s = mod_reduce(mul(s, base), n);
    }
    return s;
}

BigUint to_mont(const BigUint &a, const MontContext &ctx,
                const ParallelConfig &cfg) {
    return mont(a, ctx.r2_mod_m(), ctx, cfg);
}

BigUint from_mont(const BigUint &a_bar, const MontContext &ctx,
                  const ParallelConfig &cfg) {
    return mont(a_bar, mod_reduce(BigUint::from_u64(1), ctx.modulus()), ctx,
                cfg);
}

std::size_t mont_op_count(const BigUint &e) {
    return 2 + e.bit_length() + e.popcount() + 1;
}

ModExpResult mod_exp_mont(const BigUint &p, const BigUint &e,
                          const MontContext &ctx, const ParallelConfig &cfg,
                          const ExpObserver &observer) {
    const BigUint &m = ctx.modulus();
    if (p >= m)
        throw DomainError("base must be below the modulus");
    if (e.is_zero())
        throw DomainError("exponent must be positive");
    cfg.validate(ctx.n());

    const BigUint one = mod_reduce(BigUint::from_u64(1), m);
    ModExpResult result;
    ExpState st;
    auto record = [&](ExpOp op) {
        ++result.mont_ops;
        if (st.p_acc >= m || st.r_acc >= m)
            throw InvariantError("exponentiation residue left [0, m)");
        if (observer)
            observer(op, st);
    };

    st.p_acc = mont(ctx.r2_mod_m(), p, ctx, cfg);
    st.r_acc = BigUint(m.bit_width());
    record(ExpOp::MapPlaintext);
    st.r_acc = mont(ctx.r2_mod_m(), one, ctx, cfg);
    record(ExpOp::MapOne);
    for (std::size_t i = 0; i < e.bit_length(); ++i) {
        st.bit_index = i;
        if (e.bit(i)) {
            st.r_acc = mont(st.r_acc, st.p_acc, ctx, cfg);
            record(ExpOp::Multiply);
        }
        st.p_acc = mont(st.p_acc, st.p_acc, ctx, cfg);
        record(ExpOp::Square);
    }
    st.r_acc = mont(one, st.r_acc, ctx, cfg);
    record(ExpOp::Remap);
    result.value = st.r_acc;
    return result;
}

BigUint encrypt(const BigUint &msg, const RsaPublicKey &key,
                const ParallelConfig &cfg) {
    key.validate();
    if (msg >= key.modulus)
        throw DomainError("message must be below the modulus");
    const MontContext ctx = MontContext::for_modulus(key.modulus);
    return mod_exp_mont(msg, key.exponent, ctx, cfg).value;
}

BigUint decrypt(const BigUint &ct, const RsaPrivateKey &key,
                const ParallelConfig &cfg) {
    key.validate();
    if (ct >= key.modulus)
        throw DomainError("ciphertext must be below the modulus");
    if (key.d.is_zero())
        return BigUint::from_u64(1, key.modulus.bit_width());
    const MontContext ctx = MontContext::for_modulus(key.modulus);
    return mod_exp_mont(ct, key.d, ctx, cfg).value;
}

BigUint message_from_bytes(std::span<const std::uint8_t> bytes,
                           const RsaPublicKey &key) {
    const BigUint m = BigUint::from_bytes_be(bytes);
    if (m >= key.modulus)
        throw DomainError("message must be below the modulus");
    return m.resized(key.modulus.bit_width());
}

BigUint random_bits(std::mt19937_64 &rng, std::size_t bits) {
    BigUint r(bits);
    auto words = r.words_mut();
    for (std::size_t i = 0; i < words.size(); i += 2) {
        const std::uint64_t v = rng();
        words[i] = std::uint32_t(v);
        if (i + 1 < words.size())
            words[i + 1] = std::uint32_t(v >> 32);
    }
    for (std::size_t b = bits; b < r.bit_width(); ++b)
        r.set_bit(b, false);
    return r;
}

bool is_probable_prime(const BigUint &n, unsigned rounds, std::mt19937_64 &rng) {
    if (n < BigUint::from_u64(4))
        return n >= BigUint::from_u64(2);
    if (!n.is_odd())
        return false;

    const BigUint n_minus_1 = sub(n, BigUint::from_u64(1)).value;
    std::size_t s = 0;
    while (!n_minus_1.bit(s))
        ++s;
    const BigUint d = shift_right(n_minus_1, s);

    ParallelConfig fast;
    fast.partitions_k = 1;
    fast.digit_bits = 32;
    const MontContext ctx = MontContext::for_modulus(n, 32);
    const BigUint two = BigUint::from_u64(2);
    const BigUint n_minus_2 = sub(n_minus_1, BigUint::from_u64(1)).value;

    for (unsigned round = 0; round < rounds; ++round) {
        BigUint a;
        do {
            a = random_bits(rng, n.bit_length());
        } while (a < two || a > n_minus_2);

        BigUint x = mod_exp_mont(a, d, ctx, fast).value;
        if (x == BigUint::from_u64(1) || x == n_minus_1)
            continue;
        bool witness = true;
        for (std::size_t r = 1; r < s && witness; ++r) {
            x = mod_reduce(mul(x, x), n);
            if (x == n_minus_1)
                witness = false;
        }
        if (witness)
            return false;
    }
    return true;
}

RsaKeyPair keygen_toy(std::size_t bits, std::uint64_t seed) {
    if (bits < 16 || bits > 2048 || bits % 2 != 0)
        throw DomainError("key size must be even and between 16 and 2048 bits");
    std::mt19937_64 rng(seed);
    const std::uint32_t e = bits < 32 ? 17 : 65537;
    const std::size_t half = bits / 2;

    const BigUint p = random_prime(half, e, rng);
    BigUint q;
    do {
        q = random_prime(half, e, rng);
    } while (q == p);

    const BigUint one = BigUint::from_u64(1);
    const BigUint n = mul(p, q).resized(bits);
    const BigUint p1 = sub(p, one).value;
    const BigUint q1 = sub(q, one).value;
    const BigUint g = gcd(p1, q1);
    const BigUint lambda = mul(divmod(p1, g).quotient, q1);

    // d = (1 + t*lambda) / e with t = -lambda^-1 mod e makes e*d = 1 mod lambda.
    const std::uint32_t t = (e - inverse_small(mod_small(lambda, e), e)) % e;
    const BigUint numerator =
        add(mul_word(lambda, t), BigUint::from_u64(1)).value;
    const QuotRem<std::uint32_t> qr = divmod(numerator, BigUint::from_u64(e));
    if (!qr.remainder.is_zero())
        throw InvariantError("private exponent construction is not exact");

    RsaKeyPair kp;
    kp.public_key = {n, BigUint::from_u64(e, n.bit_width())};
    kp.private_key.modulus = n;
    kp.private_key.public_exponent = kp.public_key.exponent;
    kp.private_key.d = qr.quotient.resized(n.bit_width());
    kp.private_key.p = p;
    kp.private_key.q = q;
    kp.public_key.validate();
    kp.private_key.validate();
    return kp;
}

} // namespace montlab::rsa
