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

// Correlation power analysis against the right-to-left exponentiation: for
// each exponent bit, predict the register transition of the operation that
// follows the known prefix under both guesses and correlate the predictions
// with the traces inside that operation's cycle window.

#include "montlab/bigint.h"
#include "montlab/hwsim.h"
#include "montlab/montgomery.h"
#include "montlab/sidechannel.h"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace montlab::cpa {

/// Pearson correlation. Throws DomainError for mismatched or too-short
/// inputs and UndefinedCorrelation when either sequence is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation, or nothing when either sequence is constant.
std::optional<double> try_pearson(std::span<const double> x,
                                  std::span<const double> y);

struct Hypothesis {
    /// Predicted number of toggling register bits.
    double value = 0.0;
    /// The plaintext is 0 or 1 modulo m, a fixed point of squaring, so the
    /// prediction carries no key information.
    bool degenerate = false;
};

/// Montgomery-domain P and R after the exponent bits seen so far.
class ExpTracker {
  public:
    ExpTracker(const BigUint &plaintext, const MontContext &ctx,
               const ParallelConfig &cfg);

    /// Process one more exponent bit: multiply if set, then square.
    void advance(bool bit);

    /// guess 1: the next operation is R <- Mont(R, P), predicted as
    /// HD(R, Mont(R, P)). guess 0: it is the square P <- Mont(P, P),
    /// predicted as HD(P, Mont(P, P)).
    Hypothesis predict(bool guess) const;

    const BigUint &p_bar() const { return p_; }
    const BigUint &r_bar() const { return r_; }

  private:
    MontContext ctx_;
    ParallelConfig cfg_;
    BigUint p_;
    BigUint r_;
    bool degenerate_;
};

/// Prediction for the operation after `known_prefix_bits` (least significant
/// first, values 0 or 1).
Hypothesis hypothesize(const BigUint &plaintext,
                       std::span<const std::uint8_t> known_prefix_bits,
                       bool guess, const MontContext &ctx,
                       const ParallelConfig &cfg);

struct AttackTarget {
    BigUint modulus;
    hwsim::Geometry geometry{};
};

struct BitResult {
    std::size_t bit_index = 0;
    std::size_t op_index = 0;
    hwsim::OpWindow window{};
    /// max |r| over the window for guess 0 and guess 1.
    std::array<double, 2> max_abs_r{};
    /// Signed r per window cycle; 0 where undefined.
    std::array<std::vector<double>, 2> curve;
    /// No defined correlation anywhere in the window for that guess.
    std::array<bool, 2> undefined{};
    int chosen = 0;
    /// Neither guess produced a defined correlation.
    bool failed = false;
    std::size_t degenerate_traces = 0;

    double best() const { return max_abs_r[std::size_t(chosen)]; }
};

struct AttackResult {
    /// Least significant first.
    std::vector<std::uint8_t> recovered;
    std::vector<BitResult> bits;
    /// Statistics of the chosen guess's max |r| across bits.
    double mean_best_r = 0.0;
    double min_best_r = 0.0;
    double max_best_r = 0.0;
    bool any_failed = false;

    BigUint recovered_exponent() const;
};

/// Recover `bits_to_recover` exponent bits least significant first. Traces
/// must come from hwsim::Machine runs of load_key, load_data and run_rsa with
/// target.geometry. Throws UndefinedCorrelation for fewer than two traces and
/// DomainError when the traces are too short to hold that many bits. Bits
/// whose window falls past the end of the traces (after wrong guesses) are
/// marked failed.
AttackResult attack_exponent(const sidechannel::TraceSet &ts,
                             const AttackTarget &target,
                             std::size_t bits_to_recover);

/// Fraction of recovered bits that match the low bits of truth.
double bit_accuracy(const AttackResult &result, const BigUint &truth);

struct ProtectionReport {
    AttackResult clean;
    AttackResult protected_attack;
    double clean_accuracy = 0.0;
    double protected_accuracy = 0.0;
    /// protected mean_best_r / clean mean_best_r.
    double ratio = 0.0;
};

/// Attack both sets for truth.bit_length() bits. Throws DomainError when the
/// sets differ in shape.
ProtectionReport compare_protection(const sidechannel::TraceSet &clean,
                                    const sidechannel::TraceSet &protected_set,
                                    const AttackTarget &target,
                                    const BigUint &truth);

/// `bit_index,guess0_r,guess1_r,chosen,correct` rows followed by one
/// `# summary ...` line. `correct` is left empty without a truth value.
void write_report_csv(std::ostream &os, const AttackResult &result,
                      const std::optional<BigUint> &truth = std::nullopt);

} // namespace montlab::cpa
