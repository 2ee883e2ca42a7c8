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

#include "montlab/sidechannel.h"

#include "montlab/errors.h"
#include "montlab/rsa.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace montlab::sidechannel {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

unsigned bits_per_sample(NoiseDistribution d) {
    return d == NoiseDistribution::Uniform ? 32 : 8;
}

double sample_scale(NoiseDistribution d) {
    return d == NoiseDistribution::Uniform ? 4294967295.0 : 255.0;
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

const char *to_string(NoiseDistribution d) {
    return d == NoiseDistribution::Uniform ? "uniform" : "bitstream-scaled";
}

NoiseDistribution parse_distribution(const std::string &name) {
    if (name == "uniform")
        return NoiseDistribution::Uniform;
    if (name == "bitstream-scaled" || name == "bitstream_scaled")
        return NoiseDistribution::BitstreamScaled;
    throw ParseError("unknown noise distribution '" + name +
                     "' (expected uniform or bitstream-scaled)");
}

void NoiseConfig::validate() const {
    if (!std::isfinite(amplitude) || amplitude < 0.0)
        throw DomainError("noise amplitude must be finite and non-negative");
}

PowerTrace power_model(const hwsim::SimTrace &trace, double unit,
                       double baseline) {
    PowerTrace out;
    out.samples.reserve(trace.records.size());
    for (const hwsim::CycleRecord &r : trace.records)
        out.samples.push_back(baseline + unit * double(r.total));
    return out;
}

std::vector<std::uint8_t> random_bitstream(std::uint64_t seed,
                                           std::size_t length) {
    if (length == 0)
        throw DomainError("bit stream length must be positive");
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> bits(length);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < length; ++i) {
        if (i % 64 == 0)
            word = rng();
        bits[i] = std::uint8_t(word & 1u);
        word >>= 1;
    }
    return bits;
}

std::vector<double> noise_samples(const NoiseConfig &cfg, std::size_t length) {
    cfg.validate();
    std::vector<double> out(length, 0.0);
    if (length == 0)
        return out;
    const unsigned per = bits_per_sample(cfg.distribution);
    const double scale = cfg.amplitude / sample_scale(cfg.distribution);
    const auto bits = random_bitstream(cfg.seed, length * per);
    for (std::size_t c = 0; c < length; ++c) {
        std::uint32_t v = 0;
        for (unsigned b = 0; b < per; ++b)
            v |= std::uint32_t(bits[c * per + b]) << b;
        out[c] = scale * double(v);
    }
    return out;
}

double noise_mean(const NoiseConfig &cfg) { return cfg.amplitude / 2.0; }

double noise_stddev(const NoiseConfig &cfg) {
    // Discrete uniform on {0, ..., L} scaled by amplitude / L.
    const double levels = sample_scale(cfg.distribution) + 1.0;
    return cfg.amplitude * std::sqrt((levels * levels - 1.0) / 12.0) /
           sample_scale(cfg.distribution);
}

PowerTrace apply_countermeasure(const PowerTrace &clean,
                                const NoiseConfig &cfg) {
    PowerTrace out = clean;
    const auto noise = noise_samples(cfg, clean.samples.size());
    for (std::size_t c = 0; c < noise.size(); ++c)
        out.samples[c] += noise[c];
    out.seed = cfg.seed;
    out.is_protected = true;
    return out;
}

RandomnessReport randomness_tests(std::span<const std::uint8_t> bits) {
    const std::size_t n = bits.size();
    if (n < 100)
        throw DomainError("randomness tests need at least 100 bits, got " +
                          std::to_string(n));
    const double nd = double(n);
    std::size_t ones = 0;
    std::size_t transitions = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (bits[i] > 1)
            throw DomainError("bit stream elements must be 0 or 1");
        ones += bits[i];
        if (i > 0 && bits[i] != bits[i - 1])
            ++transitions;
    }

    RandomnessReport rep;
    const double s = 2.0 * double(ones) - nd;
    rep.monobit.statistic = std::fabs(s) / std::sqrt(nd);
    rep.monobit.p_value = std::erfc(rep.monobit.statistic / std::sqrt(2.0));
    rep.monobit.passed = rep.monobit.p_value >= kSignificance;

    const double pi = double(ones) / nd;
    const double runs = double(transitions + 1);
    rep.runs.statistic = runs;
    if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(nd)) {
        rep.runs.p_value = 0.0;
        rep.runs.passed = false;
    } else {
        const double q = pi * (1.0 - pi);
        rep.runs.p_value = std::erfc(std::fabs(runs - 2.0 * nd * q) /
                                     (2.0 * std::sqrt(2.0 * nd) * q));
        rep.runs.passed = rep.runs.p_value >= kSignificance;
    }
    return rep;
}

std::size_t TraceSet::length() const {
    if (traces.empty())
        return 0;
    const std::size_t t = traces.front().samples.size();
    for (const PowerTrace &tr : traces)
        if (tr.samples.size() != t)
            throw DomainError("traces in a set must all have the same length");
    return t;
}

void write_trace_set(std::ostream &os, const TraceSet &set) {
    const std::size_t t = set.length();
    os << "plaintext,protected";
    for (std::size_t c = 0; c < t; ++c)
        os << ",s" << c;
    os << '\n';
    for (const PowerTrace &tr : set.traces) {
        os << tr.plaintext.to_hex() << ',' << (tr.is_protected ? 1 : 0);
        for (double v : tr.samples)
            os << ',' << format_double(v);
        os << '\n';
    }
}

TraceSet read_trace_set(std::istream &is) {
    std::string line;
    if (!std::getline(is, line))
        throw ParseError("trace set is empty");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = split_csv(line);
    if (header.size() < 3 || header[0] != "plaintext" ||
        header[1] != "protected")
        throw ParseError("line 1: expected header plaintext,protected,s0,...");
    const std::size_t t = header.size() - 2;
    for (std::size_t c = 0; c < t; ++c)
        if (header[c + 2] != "s" + std::to_string(c))
            throw ParseError("line 1: column " + std::to_string(c + 3) +
                             " should be s" + std::to_string(c));

    TraceSet set;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        const auto fields = split_csv(line);
        if (fields.size() != t + 2)
            throw ParseError(where + "expected " + std::to_string(t + 2) +
                             " fields, got " + std::to_string(fields.size()));
        PowerTrace tr;
        try {
            tr.plaintext = BigUint::from_hex(fields[0]);
        } catch (const ParseError &e) {
            throw ParseError(where + e.what());
        }
        if (fields[1] != "0" && fields[1] != "1")
            throw ParseError(where + "protected flag must be 0 or 1");
        tr.is_protected = fields[1] == "1";
        tr.samples.reserve(t);
        for (std::size_t c = 0; c < t; ++c) {
            const std::string &f = fields[c + 2];
            double v = 0.0;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size() ||
                !std::isfinite(v))
                throw ParseError(where + "bad sample '" + f + "' in column s" +
                                 std::to_string(c));
            tr.samples.push_back(v);
        }
        set.traces.push_back(std::move(tr));
    }
    if (set.traces.empty())
        throw ParseError("trace set has a header but no traces");
    return set;
}

double data_dependent_stddev(const TraceSet &clean) {
    const std::size_t n = clean.size();
    if (n < 2)
        throw DomainError("need at least two traces to measure variation");
    const std::size_t t = clean.length();
    if (t == 0)
        throw DomainError("traces are empty");
    double sum_var = 0.0;
    for (std::size_t c = 0; c < t; ++c) {
        double mean = 0.0;
        for (const PowerTrace &tr : clean.traces)
            mean += tr.samples[c];
        mean /= double(n);
        double var = 0.0;
        for (const PowerTrace &tr : clean.traces) {
            const double d = tr.samples[c] - mean;
            var += d * d;
        }
        sum_var += var / double(n);
    }
    return std::sqrt(sum_var / double(t));
}

double calibrate_amplitude(const TraceSet &clean, double ratio,
                           NoiseDistribution dist) {
    if (!(ratio >= 0.0) || !std::isfinite(ratio))
        throw DomainError("calibration ratio must be finite and non-negative");
    NoiseConfig unit;
    unit.amplitude = 1.0;
    unit.distribution = dist;
    return ratio * data_dependent_stddev(clean) / noise_stddev(unit);
}

std::uint64_t trace_noise_seed(std::uint64_t seed, std::size_t index) {
    return splitmix64(splitmix64(seed) ^ std::uint64_t(index));
}

GeneratedTraces generate_traces(const BigUint &exponent, const BigUint &modulus,
                                const TraceGenConfig &cfg) {
    cfg.geometry.validate();
    if (cfg.n_traces == 0)
        throw DomainError("trace count must be positive");
    if (!modulus.is_odd() || modulus.bit_length() < 2)
        throw DomainError("modulus must be odd and greater than 1");
    const std::size_t n = cfg.geometry.n;
    const auto key = hwsim::key_bus_words(exponent, modulus, n);

    std::mt19937_64 rng(cfg.seed);
    GeneratedTraces out;
    out.clean.traces.reserve(cfg.n_traces);
    for (std::size_t i = 0; i < cfg.n_traces; ++i) {
        const BigUint pt =
            mod_reduce(rsa::random_bits(rng, modulus.bit_length() + 64), modulus)
                .resized(n);
        hwsim::Machine machine(cfg.geometry);
        machine.load_key(key);
        machine.load_data(hwsim::data_bus_words(pt, n));
        const hwsim::RunResult run = machine.run_rsa();
        PowerTrace tr = power_model(run.trace, cfg.unit, cfg.baseline);
        tr.plaintext = pt;
        tr.seed = cfg.seed;
        out.clean.traces.push_back(std::move(tr));
    }

    if (!cfg.make_protected)
        return out;
    out.amplitude = cfg.amplitude
                        ? *cfg.amplitude
                        : calibrate_amplitude(out.clean, cfg.calibration_ratio,
                                              cfg.distribution);
    out.protected_set.traces.reserve(cfg.n_traces);
    for (std::size_t i = 0; i < cfg.n_traces; ++i) {
        NoiseConfig nc;
        nc.seed = trace_noise_seed(cfg.seed, i);
        nc.amplitude = out.amplitude;
        nc.distribution = cfg.distribution;
        out.protected_set.traces.push_back(
            apply_countermeasure(out.clean.traces[i], nc));
    }
    return out;
}

} // namespace montlab::sidechannel
