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

// Power traces derived from simulator toggle counts, the additive-noise
// countermeasure driven by a seeded bit stream, two statistical tests for
// that stream, and the trace-set file format.

#include "montlab/bigint.h"
#include "montlab/hwsim.h"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace montlab::sidechannel {

struct PowerTrace {
    std::vector<double> samples;
    BigUint plaintext;
    std::uint64_t seed = 0;
    bool is_protected = false;
};

enum class NoiseDistribution {
    /// amplitude * u with u continuous in [0, 1], 32 stream bits per cycle.
    Uniform,
    /// amplitude * (byte / 255), 8 stream bits per cycle.
    BitstreamScaled,
};

const char *to_string(NoiseDistribution d);
/// Accepts "uniform" and "bitstream-scaled" (or "bitstream_scaled").
NoiseDistribution parse_distribution(const std::string &name);

struct NoiseConfig {
    std::uint64_t seed = 1;
    /// Peak of the per-cycle noise; the mean is amplitude / 2.
    double amplitude = 0.0;
    NoiseDistribution distribution = NoiseDistribution::BitstreamScaled;

    /// Throws DomainError for a negative or non-finite amplitude.
    void validate() const;
};

/// sample[c] = baseline + unit * toggles_total[c].
PowerTrace power_model(const hwsim::SimTrace &trace, double unit = 1.0,
                       double baseline = 0.0);

/// Deterministic bit stream (one bit per element, values 0 or 1).
std::vector<std::uint8_t> random_bitstream(std::uint64_t seed,
                                           std::size_t length);

/// Per-cycle noise values for `length` cycles.
std::vector<double> noise_samples(const NoiseConfig &cfg, std::size_t length);

/// Mean and standard deviation of one noise sample for the given config.
double noise_mean(const NoiseConfig &cfg);
double noise_stddev(const NoiseConfig &cfg);

/// Adds noise_samples(cfg) to a copy of the clean trace.
PowerTrace apply_countermeasure(const PowerTrace &clean, const NoiseConfig &cfg);

struct TestOutcome {
    double statistic = 0.0;
    double p_value = 0.0;
    bool passed = false;
};

struct RandomnessReport {
    TestOutcome monobit;
    TestOutcome runs;
};

inline constexpr double kSignificance = 0.01;

/// Frequency (monobit) and runs tests at significance 0.01. The runs test
/// fails outright when the ones proportion is too far from 1/2 for it to
/// apply. Throws DomainError for fewer than 100 bits.
RandomnessReport randomness_tests(std::span<const std::uint8_t> bits);

struct TraceSet {
    std::vector<PowerTrace> traces;

    std::size_t size() const { return traces.size(); }
    /// Common sample count; throws DomainError if the rows disagree.
    std::size_t length() const;
};

/// Header `plaintext,protected,s0,s1,...`, one row per trace, plaintext in hex.
void write_trace_set(std::ostream &os, const TraceSet &set);
/// Throws ParseError with the offending line number.
TraceSet read_trace_set(std::istream &is);

/// Root mean square over cycles of the across-trace standard deviation: the
/// size of the data-dependent part of the clean power.
double data_dependent_stddev(const TraceSet &clean);

/// Amplitude that makes the noise standard deviation `ratio` times the
/// data-dependent standard deviation of the clean set.
double calibrate_amplitude(const TraceSet &clean, double ratio = 2.0,
                           NoiseDistribution dist =
                               NoiseDistribution::BitstreamScaled);

/// Seed of the noise stream for trace `index` of a set generated from `seed`.
std::uint64_t trace_noise_seed(std::uint64_t seed, std::size_t index);

struct TraceGenConfig {
    hwsim::Geometry geometry{};
    std::size_t n_traces = 100;
    std::uint64_t seed = 1;
    double unit = 1.0;
    double baseline = 0.0;
    /// Generate the protected set as well.
    bool make_protected = false;
    /// Fixed noise amplitude; calibrated from the clean set when absent.
    std::optional<double> amplitude;
    double calibration_ratio = 2.0;
    NoiseDistribution distribution = NoiseDistribution::BitstreamScaled;
};

struct GeneratedTraces {
    TraceSet clean;
    /// Empty unless make_protected was set.
    TraceSet protected_set;
    double amplitude = 0.0;
};

/// Simulate one encryption per random plaintext below the modulus, with the
/// machine loaded from scratch each time so every trace shares the same
/// alignment (see hwsim::op_window).
GeneratedTraces generate_traces(const BigUint &exponent, const BigUint &modulus,
                                const TraceGenConfig &cfg);

} // namespace montlab::sidechannel
