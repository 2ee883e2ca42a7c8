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
#include "montlab/sidechannel.h"

#include "oracle.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace montlab;
using namespace montlab::sidechannel;

namespace {

hwsim::SimTrace toy_trace(std::initializer_list<std::uint32_t> totals) {
    hwsim::SimTrace t;
    std::uint64_t c = 0;
    for (std::uint32_t v : totals) {
        hwsim::CycleRecord r;
        r.cycle = c++;
        r.total = v;
        t.records.push_back(r);
    }
    return t;
}

std::vector<std::uint8_t> bits_from(const std::string &s) {
    std::vector<std::uint8_t> out;
    for (char ch : s)
        if (ch == '0' || ch == '1')
            out.push_back(std::uint8_t(ch - '0'));
    return out;
}

double mean(const std::vector<double> &v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

TraceGenConfig toy_gen(std::size_t n_traces, std::uint64_t seed) {
    TraceGenConfig cfg;
    cfg.geometry.n = 64;
    cfg.n_traces = n_traces;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST(PowerModel, DirectSubstitution) {
    const PowerTrace p = power_model(toy_trace({0, 5, 2}), 1.0, 10.0);
    EXPECT_EQ(p.samples, (std::vector<double>{10.0, 15.0, 12.0}));
}

TEST(PowerModel, IdleTraceIsBaseline) {
    const PowerTrace p = power_model(toy_trace({0, 0, 0, 0}), 3.0, 7.5);
    for (double v : p.samples)
        EXPECT_EQ(v, 7.5);
}

TEST(PowerModel, LinearInUnit) {
    const auto t = toy_trace({3, 1, 4, 1, 5, 9, 2, 6});
    const PowerTrace a = power_model(t, 1.5, 2.0), b = power_model(t, 3.0, 2.0);
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        EXPECT_DOUBLE_EQ(b.samples[i] - 2.0, 2.0 * (a.samples[i] - 2.0));
}

TEST(Bitstream, Deterministic) {
    EXPECT_EQ(random_bitstream(42, 1000), random_bitstream(42, 1000));
    const auto long_stream = random_bitstream(42, 2000);
    const auto short_stream = random_bitstream(42, 1000);
    EXPECT_TRUE(std::equal(short_stream.begin(), short_stream.end(), long_stream.begin()));
    EXPECT_THROW(random_bitstream(1, 0), DomainError);
    for (std::uint8_t b : long_stream)
        EXPECT_LE(b, 1u);
}

TEST(Bitstream, MonobitStatisticWithinBand) {
    const auto bits = random_bitstream(7, 20000);
    const double ones = double(std::count(bits.begin(), bits.end(), 1));
    const double stat = std::fabs(ones - (20000.0 - ones)) / std::sqrt(20000.0);
    // Two-sided 1% normal tail.
    EXPECT_LT(stat, 2.5758);
}

TEST(Bitstream, NeighbouringSeedsDiffer) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto a = random_bitstream(s, 10000), b = random_bitstream(s + 1, 10000);
        std::size_t diff = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            diff += a[i] != b[i];
        EXPECT_GE(diff, 3000u) << s;
    }
}

TEST(Countermeasure, ZeroAmplitudeIsIdentity) {
    const PowerTrace clean = power_model(toy_trace({1, 2, 3, 4}));
    NoiseConfig nc;
    nc.amplitude = 0.0;
    const PowerTrace p = apply_countermeasure(clean, nc);
    EXPECT_EQ(p.samples, clean.samples);
    EXPECT_TRUE(p.is_protected);
    EXPECT_FALSE(clean.is_protected);
}

TEST(Countermeasure, MeanMatchesDistribution) {
    PowerTrace clean;
    clean.samples.assign(10000, 5.0);
    for (auto dist : {NoiseDistribution::BitstreamScaled, NoiseDistribution::Uniform}) {
        NoiseConfig nc;
        nc.seed = 3;
        nc.amplitude = 40.0;
        nc.distribution = dist;
        const PowerTrace p = apply_countermeasure(clean, nc);
        std::vector<double> diff(p.samples.size());
        for (std::size_t i = 0; i < diff.size(); ++i) {
            diff[i] = p.samples[i] - clean.samples[i];
            EXPECT_GE(diff[i], 0.0);
            EXPECT_LE(diff[i], 40.0);
        }
        EXPECT_NEAR(mean(diff), 20.0, 20.0 * 0.05);
        EXPECT_DOUBLE_EQ(noise_mean(nc), 20.0);
        double var = 0;
        for (double d : diff)
            var += (d - mean(diff)) * (d - mean(diff));
        EXPECT_NEAR(std::sqrt(var / diff.size()), noise_stddev(nc), noise_stddev(nc) * 0.05);
    }
}

TEST(Countermeasure, ReproducibleAndSeedDependent) {
    const PowerTrace clean = power_model(toy_trace({1, 2, 3, 4, 5, 6, 7, 8}));
    NoiseConfig a;
    a.seed = 10;
    a.amplitude = 8.0;
    NoiseConfig b = a;
    b.seed = 11;
    EXPECT_EQ(apply_countermeasure(clean, a).samples, apply_countermeasure(clean, a).samples);
    EXPECT_NE(mean(apply_countermeasure(clean, a).samples),
              mean(apply_countermeasure(clean, b).samples));
    EXPECT_EQ(apply_countermeasure(clean, a).samples.size(), clean.samples.size());
}

TEST(Countermeasure, AveragePowerVariesAcrossSeeds) {
    PowerTrace clean;
    clean.samples.assign(500, 10.0);
    std::vector<double> averages;
    for (std::uint64_t s = 0; s < 100; ++s) {
        NoiseConfig nc;
        nc.seed = s;
        nc.amplitude = 10.0;
        averages.push_back(mean(apply_countermeasure(clean, nc).samples));
    }
    const double m = mean(averages);
    double var = 0;
    for (double a : averages)
        var += (a - m) * (a - m);
    EXPECT_GT(var, 0.0);
}

TEST(Countermeasure, RejectsNegativeAmplitude) {
    NoiseConfig nc;
    nc.amplitude = -1.0;
    EXPECT_THROW(nc.validate(), DomainError);
    EXPECT_THROW(noise_samples(nc, 4), DomainError);
}

TEST(Randomness, AllZerosFailsMonobit) {
    const std::vector<std::uint8_t> zeros(1000, 0);
    const auto rep = randomness_tests(zeros);
    EXPECT_FALSE(rep.monobit.passed);
    EXPECT_FALSE(rep.runs.passed);
}

TEST(Randomness, AlternatingPassesMonobitFailsRuns) {
    std::vector<std::uint8_t> alt(1000);
    for (std::size_t i = 0; i < alt.size(); ++i)
        alt[i] = std::uint8_t(i % 2);
    const auto rep = randomness_tests(alt);
    EXPECT_TRUE(rep.monobit.passed);
    EXPECT_DOUBLE_EQ(rep.monobit.statistic, 0.0);
    EXPECT_FALSE(rep.runs.passed);
    EXPECT_DOUBLE_EQ(rep.runs.statistic, 1000.0);
    // Direct evaluation: V = n, pi = 1/2.
    const double expect_p = std::erfc(std::fabs(1000.0 - 500.0) / (2.0 * std::sqrt(2000.0) * 0.25));
    EXPECT_DOUBLE_EQ(rep.runs.p_value, expect_p);
}

TEST(Randomness, PublishedHundredBitExample) {
    // The 100-bit example sequence used to illustrate the frequency and runs
    // tests in NIST SP 800-22, with its documented P-values.
    const auto bits = bits_from(
        "1100100100001111110110101010001000100001011010001100001000110100"
        "110001001100011001100010100010111000");
    ASSERT_EQ(bits.size(), 100u);
    const auto rep = randomness_tests(bits);
    EXPECT_NEAR(rep.monobit.p_value, 0.109599, 1e-6);
    EXPECT_TRUE(rep.monobit.passed);
    EXPECT_NEAR(rep.runs.p_value, 0.500798, 1e-6);
    EXPECT_TRUE(rep.runs.passed);
}

TEST(Randomness, TooShortInput) {
    const std::vector<std::uint8_t> bits(99, 1);
    EXPECT_THROW(randomness_tests(bits), DomainError);
}

TEST(Randomness, GeneratorPassesForMostSeeds) {
    int passes = 0;
    for (std::uint64_t s = 1; s <= 100; ++s) {
        const auto rep = randomness_tests(random_bitstream(s, 20000));
        passes += rep.monobit.passed && rep.runs.passed;
    }
    EXPECT_GE(passes, 97);
}

TEST(TraceSetCsv, RoundTrip) {
    TraceSet set;
    for (int i = 0; i < 3; ++i) {
        PowerTrace t;
        t.plaintext = BigUint::from_u64(0xabc + i, 64);
        t.samples = {1.0 + i, 2.5, 1e-3 * i, 12345.678};
        t.is_protected = i == 1;
        set.traces.push_back(t);
    }
    std::stringstream ss;
    write_trace_set(ss, set);
    EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "plaintext,protected,s0,s1,s2,s3");
    const TraceSet back = read_trace_set(ss);
    ASSERT_EQ(back.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back.traces[i].samples, set.traces[i].samples);
        EXPECT_EQ(back.traces[i].plaintext, set.traces[i].plaintext);
        EXPECT_EQ(back.traces[i].is_protected, set.traces[i].is_protected);
    }
}

TEST(TraceSetCsv, RejectsMalformedFiles) {
    auto parse = [](const std::string &text) {
        std::istringstream is(text);
        return read_trace_set(is);
    };
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("plaintext,protected\n"), ParseError);
    EXPECT_THROW(parse("pt,protected,s0\n1,0,1\n"), ParseError);
    EXPECT_THROW(parse("plaintext,protected,s1\n1,0,1\n"), ParseError);
    EXPECT_THROW(parse("plaintext,protected,s0\n"), ParseError);
    EXPECT_THROW(parse("plaintext,protected,s0,s1\n1,0,1\n"), ParseError);
    EXPECT_THROW(parse("plaintext,protected,s0\nxyz,0,1\n"), ParseError);
    EXPECT_THROW(parse("plaintext,protected,s0\n1,2,1\n"), ParseError);
    EXPECT_THROW(parse("plaintext,protected,s0\n1,0,abc\n"), ParseError);
    EXPECT_THROW(parse("plaintext,protected,s0\n1,0,inf\n"), ParseError);
    EXPECT_NO_THROW(parse("plaintext,protected,s0\r\n1,0,1\r\n\n"));
}

TEST(TraceGeneration, CleanSetsShareGeometry) {
    const auto kp = rsa::keygen_toy(64, 12);
    const auto gen = generate_traces(BigUint::from_u64(0xb5a7, 64),
                                     kp.public_key.modulus, toy_gen(20, 5));
    ASSERT_EQ(gen.clean.size(), 20u);
    EXPECT_TRUE(gen.protected_set.traces.empty());
    hwsim::Geometry g;
    g.n = 64;
    EXPECT_EQ(gen.clean.length(),
              g.total_cycles(rsa::mont_op_count(BigUint::from_u64(0xb5a7))));
    for (const PowerTrace &t : gen.clean.traces)
        EXPECT_LT(t.plaintext, kp.public_key.modulus);
}

TEST(TraceGeneration, ProtectedSetIsCalibrated) {
    const auto kp = rsa::keygen_toy(64, 13);
    TraceGenConfig cfg = toy_gen(50, 6);
    cfg.make_protected = true;
    const auto gen = generate_traces(BigUint::from_u64(0x9f31, 64), kp.public_key.modulus, cfg);
    ASSERT_EQ(gen.protected_set.size(), 50u);
    EXPECT_EQ(gen.protected_set.length(), gen.clean.length());
    NoiseConfig nc;
    nc.amplitude = gen.amplitude;
    EXPECT_NEAR(noise_stddev(nc), 2.0 * data_dependent_stddev(gen.clean), 1e-9);
    for (std::size_t i = 0; i < gen.clean.size(); ++i) {
        EXPECT_TRUE(gen.protected_set.traces[i].is_protected);
        EXPECT_EQ(gen.protected_set.traces[i].plaintext, gen.clean.traces[i].plaintext);
        for (std::size_t c = 0; c < gen.clean.length(); ++c)
            EXPECT_GE(gen.protected_set.traces[i].samples[c], gen.clean.traces[i].samples[c]);
    }
    const auto again = generate_traces(BigUint::from_u64(0x9f31, 64), kp.public_key.modulus, cfg);
    EXPECT_EQ(again.protected_set.traces[7].samples, gen.protected_set.traces[7].samples);
    cfg.amplitude = 3.0;
    EXPECT_EQ(generate_traces(BigUint::from_u64(0x9f31, 64), kp.public_key.modulus, cfg).amplitude,
              3.0);
}

TEST(Calibration, NeedsTwoTraces) {
    TraceSet one;
    one.traces.push_back(power_model(toy_trace({1, 2})));
    EXPECT_THROW(data_dependent_stddev(one), DomainError);
}

TEST(Distribution, Names) {
    EXPECT_EQ(parse_distribution("uniform"), NoiseDistribution::Uniform);
    EXPECT_EQ(parse_distribution("bitstream-scaled"), NoiseDistribution::BitstreamScaled);
    EXPECT_THROW(parse_distribution("gaussian"), ParseError);
}
