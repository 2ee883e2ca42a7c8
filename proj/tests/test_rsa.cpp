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

#include "montlab/errors.h"
#include "montlab/rsa.h"

#include "oracle.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace montlab;
using namespace montlab::rsa;

namespace {

BigUint u(std::uint64_t v, std::size_t width = 64) {
    return BigUint::from_u64(v, width);
}

} // namespace

TEST(ModExpNaive, MatchesMachineIntegers) {
    std::mt19937_64 rng(101);
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t m = (rng() >> 32) | 2;
        const std::uint64_t x = rng() % m, d = rng() >> (rng() % 64);
        EXPECT_EQ(mod_exp_naive(u(x), u(d), u(m)).to_u64(),
                  oracle::powm_u64(x, d, m));
    }
}

TEST(ModExpNaive, EdgeCases) {
    EXPECT_EQ(mod_exp_naive(u(5), u(0), u(7)).to_u64(), 1u);
    EXPECT_EQ(mod_exp_naive(u(0), u(0), u(7)).to_u64(), 1u);
    EXPECT_EQ(mod_exp_naive(u(12), u(1), u(7)).to_u64(), 5u);
    EXPECT_THROW(mod_exp_naive(u(2), u(3), u(1)), DomainError);
    EXPECT_THROW(mod_exp_naive(u(2), u(3), u(0)), DomainError);
}

TEST(ModExpMont, TextbookExample) {
    const MontContext ctx(u(3233, 32), 32);
    const auto r = mod_exp_mont(u(65, 32), u(17, 32), ctx);
    EXPECT_EQ(r.value.to_u64(), 2790u);
    EXPECT_EQ(r.mont_ops, 2u + 5u + 2u + 1u);
    EXPECT_EQ(mod_exp_mont(u(2790, 32), u(2753, 32), ctx).value.to_u64(), 65u);
}

TEST(ModExpMont, MatchesGmpOnRandomInstances) {
    std::mt19937_64 rng(111);
    for (std::size_t n : {32u, 64u, 160u, 512u}) {
        for (int i = 0; i < 15; ++i) {
            const mpz_class m = oracle::random_odd_modulus(rng, n);
            const mpz_class x = oracle::random_below(rng, m);
            mpz_class e = oracle::random_mpz(rng, 1 + rng() % n);
            if (e == 0)
                e = 1;
            const MontContext ctx(oracle::from_mpz(m, n), n);
            const auto r = mod_exp_mont(oracle::from_mpz(x, n),
                                        oracle::from_mpz(e, n), ctx);
            EXPECT_EQ(oracle::to_mpz(r.value), oracle::powm(x, e, m));
            EXPECT_EQ(r.mont_ops, 3 + mpz_sizeinbase(e.get_mpz_t(), 2) +
                                      oracle::popcount_mpz(e));
        }
    }
}

TEST(ModExpMont, AgreesAcrossParallelConfigs) {
    std::mt19937_64 rng(121);
    const mpz_class m = oracle::random_odd_modulus(rng, 256);
    const MontContext ctx(oracle::from_mpz(m, 256), 256);
    const BigUint x = oracle::from_mpz(oracle::random_below(rng, m), 256);
    const BigUint e = oracle::from_mpz(oracle::random_mpz(rng, 100), 256);
    const BigUint ref = mod_exp_mont(x, e, ctx).value;
    for (unsigned d : {1u, 2u, 4u, 8u}) {
        ParallelConfig cfg;
        cfg.partitions_k = 8 / d;
        cfg.digit_bits = d;
        EXPECT_EQ(mod_exp_mont(x, e, ctx, cfg).value, ref);
    }
}

TEST(ModExpMont, ObserverSeesTheSchedule) {
    const MontContext ctx(u(1000003, 32), 32);
    std::vector<ExpOp> ops;
    mod_exp_mont(u(12345, 32), u(0b1011, 32), ctx, {},
                 [&](ExpOp op, const ExpState &st) {
                     ops.push_back(op);
                     EXPECT_LT(st.p_acc, ctx.modulus());
                     EXPECT_LT(st.r_acc, ctx.modulus());
                 });
    using O = ExpOp;
    const std::vector<ExpOp> expect{O::MapPlaintext, O::MapOne, O::Multiply,
                                    O::Square, O::Multiply, O::Square,
                                    O::Square, O::Multiply, O::Square, O::Remap};
    EXPECT_EQ(ops, expect);
    EXPECT_STREQ(to_string(ExpOp::Multiply), "multiply");
}

TEST(ModExpMont, OperationCountFormula) {
    EXPECT_EQ(mont_op_count(u(1)), 5u);
    EXPECT_EQ(mont_op_count(u(0b1011)), 10u);
    BigUint ones(1024);
    for (std::size_t i = 0; i < 1024; ++i)
        ones.set_bit(i);
    EXPECT_EQ(mont_op_count(ones), 2051u);
}

TEST(ModExpMont, RejectsBadArguments) {
    const MontContext ctx(u(101, 32), 32);
    EXPECT_THROW(mod_exp_mont(u(101, 32), u(3, 32), ctx), DomainError);
    EXPECT_THROW(mod_exp_mont(u(5, 32), u(0, 32), ctx), DomainError);
}

TEST(Mapping, ToAndFromMontgomeryDomain) {
    std::mt19937_64 rng(131);
    const mpz_class m = oracle::random_odd_modulus(rng, 128);
    const MontContext ctx(oracle::from_mpz(m, 128), 128);
    const mpz_class a = oracle::random_below(rng, m);
    const BigUint abar = to_mont(oracle::from_mpz(a, 128), ctx);
    EXPECT_EQ(oracle::to_mpz(abar), (a << 128) % m);
    EXPECT_EQ(oracle::to_mpz(from_mont(abar, ctx)), a);
}

TEST(Primality, MatchesGmpOnSmallRange) {
    std::mt19937_64 rng(141);
    for (std::uint64_t v = 0; v < 3000; ++v) {
        const bool expect = mpz_probab_prime_p(mpz_class(static_cast<unsigned long>(v)).get_mpz_t(), 25) > 0;
        EXPECT_EQ(is_probable_prime(u(v), 20, rng), expect) << v;
    }
    // Carmichael numbers.
    for (std::uint64_t c : {561u, 1105u, 1729u, 2465u, 2821u, 6601u, 8911u})
        EXPECT_FALSE(is_probable_prime(u(c), 20, rng)) << c;
}

TEST(Primality, LargeKnownValues) {
    std::mt19937_64 rng(151);
    const mpz_class p = (mpz_class(1) << 127) - 1; // Mersenne prime
    EXPECT_TRUE(is_probable_prime(oracle::from_mpz(p, 128), 20, rng));
    EXPECT_FALSE(is_probable_prime(oracle::from_mpz(p * 3, 160), 20, rng));
}

TEST(Keygen, ProducesValidKeys) {
    for (std::size_t bits : {16u, 32u, 64u, 128u, 256u}) {
        const auto kp = keygen_toy(bits, 7 + bits);
        const auto &sk = kp.private_key;
        ASSERT_TRUE(sk.p && sk.q);
        const mpz_class p = oracle::to_mpz(*sk.p), q = oracle::to_mpz(*sk.q);
        const mpz_class n = oracle::to_mpz(sk.modulus);
        EXPECT_EQ(p * q, n);
        EXPECT_EQ(mpz_sizeinbase(n.get_mpz_t(), 2), bits);
        EXPECT_GT(mpz_probab_prime_p(p.get_mpz_t(), 30), 0);
        EXPECT_GT(mpz_probab_prime_p(q.get_mpz_t(), 30), 0);
        EXPECT_NE(p, q);
        mpz_class lambda;
        const mpz_class p1 = p - 1, q1 = q - 1;
        mpz_lcm(lambda.get_mpz_t(), p1.get_mpz_t(), q1.get_mpz_t());
        const mpz_class e = oracle::to_mpz(kp.public_key.exponent);
        EXPECT_EQ(e, bits < 32 ? 17 : 65537);
        EXPECT_EQ(e * oracle::to_mpz(sk.d) % lambda, 1);
        EXPECT_NO_THROW(kp.public_key.validate());
        EXPECT_NO_THROW(sk.validate());
    }
}

TEST(Keygen, IsDeterministicPerSeed) {
    const auto a = keygen_toy(64, 99), b = keygen_toy(64, 99), c = keygen_toy(64, 100);
    EXPECT_EQ(a.private_key.d, b.private_key.d);
    EXPECT_EQ(a.public_key.modulus, b.public_key.modulus);
    EXPECT_NE(a.public_key.modulus, c.public_key.modulus);
}

TEST(Keygen, RejectsBadSizes) {
    EXPECT_THROW(keygen_toy(15, 1), DomainError);
    EXPECT_THROW(keygen_toy(8, 1), DomainError);
    EXPECT_THROW(keygen_toy(4096, 1), DomainError);
}

TEST(Rsa, EncryptDecryptRoundTrip) {
    std::mt19937_64 rng(161);
    for (std::size_t bits : {32u, 64u, 256u}) {
        const auto kp = keygen_toy(bits, bits);
        const mpz_class n = oracle::to_mpz(kp.public_key.modulus);
        for (int i = 0; i < 10; ++i) {
            const mpz_class m = oracle::random_below(rng, n);
            const BigUint msg = oracle::from_mpz(m, kp.public_key.modulus.bit_width());
            const BigUint ct = encrypt(msg, kp.public_key);
            EXPECT_EQ(oracle::to_mpz(ct),
                      oracle::powm(m, oracle::to_mpz(kp.public_key.exponent), n));
            EXPECT_EQ(decrypt(ct, kp.private_key), msg);
        }
    }
}

TEST(Rsa, MessageMustBeBelowModulus) {
    const RsaPublicKey key{u(3233), u(17)};
    EXPECT_THROW(encrypt(u(3233), key), DomainError);
    EXPECT_EQ(encrypt(u(65), key).to_u64(), 2790u);
}

TEST(Rsa, MessageFromBytes) {
    const RsaPublicKey key{u(3233), u(17)};
    const std::vector<std::uint8_t> ok{0x0c, 0xa0};
    EXPECT_EQ(message_from_bytes(ok, key).to_u64(), 0xca0u);
    const std::vector<std::uint8_t> big{0x0c, 0xa1};
    EXPECT_THROW(message_from_bytes(big, key), DomainError);
}

TEST(RsaKeys, ValidateRejectsBadKeys) {
    EXPECT_THROW((RsaPublicKey{u(3232), u(17)}.validate()), DomainError);
    EXPECT_THROW((RsaPublicKey{u(3233), u(1)}.validate()), DomainError);
    EXPECT_THROW((RsaPublicKey{u(3233), u(4000)}.validate()), DomainError);
}

TEST(KeyFile, RoundTrip) {
    const auto kp = keygen_toy(64, 5);
    const auto pub = parse_public_key(format_public_key(kp.public_key));
    EXPECT_EQ(pub.modulus, kp.public_key.modulus);
    EXPECT_EQ(pub.exponent, kp.public_key.exponent);
    const auto priv = parse_private_key(format_private_key(kp.private_key));
    EXPECT_EQ(priv.d, kp.private_key.d);
    EXPECT_EQ(*priv.p, *kp.private_key.p);
    EXPECT_EQ(*priv.q, *kp.private_key.q);
    EXPECT_EQ(format_private_key(priv), format_private_key(kp.private_key));
}

TEST(KeyFile, AcceptsCommentsAndWhitespace) {
    const auto key = parse_public_key("# toy key\n  n = ca1 \n\ne=11\n");
    EXPECT_EQ(key.modulus.to_u64(), 3233u);
    EXPECT_EQ(key.exponent.to_u64(), 17u);
}

TEST(KeyFile, RejectsMalformedInput) {
    EXPECT_THROW(parse_public_key("n=ca1\n"), ParseError);
    EXPECT_THROW(parse_public_key("n=ca1\ne=11\ne=11\n"), ParseError);
    EXPECT_THROW(parse_public_key("n=ca1\ne=11\nx=1\n"), ParseError);
    EXPECT_THROW(parse_public_key("n=zz\ne=11\n"), ParseError);
    EXPECT_THROW(parse_public_key("n ca1\ne=11\n"), ParseError);
    EXPECT_THROW(parse_private_key("n=ca1\ne=11\n"), ParseError);
    EXPECT_THROW(parse_private_key("n=ca1\ne=11\nd=ac1\np=3d\n"), ParseError);
}

TEST(KeyFile, FileIo) {
    const auto dir = std::filesystem::temp_directory_path() / "montlab_keyfile_test";
    std::filesystem::create_directories(dir);
    const auto kp = keygen_toy(32, 3);
    const std::string path = (dir / "k.pub").string();
    write_text_file(path, format_public_key(kp.public_key));
    EXPECT_EQ(read_public_key(path).modulus, kp.public_key.modulus);
    EXPECT_THROW(read_public_key((dir / "missing").string()), IoError);
    EXPECT_THROW(write_text_file((dir / "no/such/dir/x").string(), "x"), IoError);
    std::filesystem::remove_all(dir);
}
