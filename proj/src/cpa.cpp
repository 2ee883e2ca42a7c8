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

#include "montlab/cpa.h"

#include "montlab/errors.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace montlab::cpa {

std::optional<double> try_pearson(std::span<const double> x,
                                  std::span<const double> y) {
    if (x.size() != y.size())
        throw DomainError("correlation inputs differ in length");
    const std::size_t n = x.size();
    if (n < 2)
        throw DomainError("correlation needs at least two samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const auto r = try_pearson(x, y);
    if (!r)
        throw UndefinedCorrelation("correlation is undefined for a constant "
                                   "sequence");
    return *r;
}

ExpTracker::ExpTracker(const BigUint &plaintext, const MontContext &ctx,
                       const ParallelConfig &cfg)
    : ctx_(ctx), cfg_(cfg) {
    const BigUint &m = ctx.modulus();
    const std::size_t width = ctx.operand_bits();
    const BigUint x = mod_reduce(plaintext, m).resized(width);
    const BigUint one = mod_reduce(BigUint::from_u64(1, width), m).resized(width);
    degenerate_ = x.is_zero() || x == one;
    p_ = mont_parallel(ctx.r2_mod_m(), x, ctx, cfg);
    r_ = mont_parallel(ctx.r2_mod_m(), one, ctx, cfg);
}

void ExpTracker::advance(bool bit) {
    if (bit)
        r_ = mont_parallel(r_, p_, ctx_, cfg_);
    p_ = mont_parallel(p_, p_, ctx_, cfg_);
}

Hypothesis ExpTracker::predict(bool guess) const {
    Hypothesis h;
    h.degenerate = degenerate_;
    if (guess)
        h.value = double(hamming_distance(r_, mont_parallel(r_, p_, ctx_, cfg_)));
    else
        h.value = double(hamming_distance(p_, mont_parallel(p_, p_, ctx_, cfg_)));
    return h;
}

Hypothesis hypothesize(const BigUint &plaintext,
                       std::span<const std::uint8_t> known_prefix_bits,
                       bool guess, const MontContext &ctx,
                       const ParallelConfig &cfg) {
    ExpTracker t(plaintext, ctx, cfg);
    for (std::uint8_t b : known_prefix_bits)
        t.advance(b != 0);
    return t.predict(guess);
}

BigUint AttackResult::recovered_exponent() const {
    BigUint e(std::max<std::size_t>(recovered.size(), 1));
    for (std::size_t i = 0; i < recovered.size(); ++i)
        if (recovered[i])
            e.set_bit(i);
    return e;
}

AttackResult attack_exponent(const sidechannel::TraceSet &ts,
                             const AttackTarget &target,
                             std::size_t bits_to_recover) {
    const std::size_t n = ts.size();
    if (n < 2)
        throw UndefinedCorrelation("an attack needs at least two traces, got " +
                                   std::to_string(n));
    if (bits_to_recover == 0)
        throw DomainError("nothing to recover: bit count is zero");
    const hwsim::Geometry &geom = target.geometry;
    geom.validate();
    const std::size_t length = ts.length();
    const MontContext ctx(target.modulus, geom.n, geom.cfg.word_radix_bits());
    if (hwsim::op_window(geom, 1 + bits_to_recover).end > length)
        throw DomainError(std::to_string(bits_to_recover) +
                          " exponent bits cannot fit in traces of " +
                          std::to_string(length) + " samples");

    std::vector<ExpTracker> trackers;
    trackers.reserve(n);
    std::size_t degenerate = 0;
    for (const sidechannel::PowerTrace &tr : ts.traces) {
        if (tr.plaintext.bit_length() > geom.n)
            throw DomainError("trace plaintext is wider than the datapath");
        trackers.emplace_back(tr.plaintext, ctx, geom.cfg);
        degenerate += trackers.back().predict(false).degenerate ? 1 : 0;
    }

    AttackResult res;
    std::size_t ones = 0;
    std::vector<double> hyp(n), column(n);
    for (std::size_t i = 0; i < bits_to_recover; ++i) {
        BitResult br;
        br.bit_index = i;
        br.op_index = 2 + i + ones;
        br.window = hwsim::op_window(geom, br.op_index);
        br.degenerate_traces = degenerate;
        // Earlier wrong guesses can push the schedule past the end of the
        // traces; there is nothing left to correlate against.
        const bool in_range = br.window.end <= length;
        for (int g = 0; g < 2 && !in_range; ++g)
            br.undefined[std::size_t(g)] = true;

        for (int g = 0; g < 2 && in_range; ++g) {
            for (std::size_t t = 0; t < n; ++t)
                hyp[t] = trackers[t].predict(g == 1).value;
            auto &curve = br.curve[std::size_t(g)];
            curve.assign(br.window.end - br.window.begin, 0.0);
            bool any = false;
            double best = 0.0;
            for (std::size_t c = br.window.begin; c < br.window.end; ++c) {
                for (std::size_t t = 0; t < n; ++t)
                    column[t] = ts.traces[t].samples[c];
                const auto r = try_pearson(hyp, column);
                if (!r)
                    continue;
                any = true;
                curve[c - br.window.begin] = *r;
                best = std::max(best, std::fabs(*r));
            }
            br.undefined[std::size_t(g)] = !any;
            br.max_abs_r[std::size_t(g)] = best;
        }
        br.failed = br.undefined[0] && br.undefined[1];
        br.chosen = br.max_abs_r[1] > br.max_abs_r[0] ? 1 : 0;

        res.recovered.push_back(std::uint8_t(br.chosen));
        res.any_failed = res.any_failed || br.failed;
        for (ExpTracker &t : trackers)
            t.advance(br.chosen == 1);
        ones += std::size_t(br.chosen);
        res.bits.push_back(std::move(br));
    }

    double sum = 0.0;
    res.min_best_r = 1.0;
    res.max_best_r = 0.0;
    for (const BitResult &b : res.bits) {
        sum += b.best();
        res.min_best_r = std::min(res.min_best_r, b.best());
        res.max_best_r = std::max(res.max_best_r, b.best());
    }
    res.mean_best_r = sum / double(res.bits.size());
    return res;
}

double bit_accuracy(const AttackResult &result, const BigUint &truth) {
    if (result.recovered.empty())
        return 0.0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < result.recovered.size(); ++i)
        ok += (result.recovered[i] != 0) == truth.bit(i) ? 1 : 0;
    return double(ok) / double(result.recovered.size());
}

ProtectionReport compare_protection(const sidechannel::TraceSet &clean,
                                    const sidechannel::TraceSet &protected_set,
                                    const AttackTarget &target,
                                    const BigUint &truth) {
    if (clean.size() != protected_set.size() ||
        clean.length() != protected_set.length())
        throw DomainError("clean and protected trace sets differ in shape");
    const std::size_t bits = truth.bit_length();
    ProtectionReport rep;
    rep.clean = attack_exponent(clean, target, bits);
    rep.protected_attack = attack_exponent(protected_set, target, bits);
    rep.clean_accuracy = bit_accuracy(rep.clean, truth);
    rep.protected_accuracy = bit_accuracy(rep.protected_attack, truth);
    if (rep.clean.mean_best_r == 0.0)
        throw UndefinedCorrelation("clean attack found no correlation, so the "
                                   "ratio is undefined");
    rep.ratio = rep.protected_attack.mean_best_r / rep.clean.mean_best_r;
    return rep;
}

void write_report_csv(std::ostream &os, const AttackResult &result,
                      const std::optional<BigUint> &truth) {
    const auto flags = os.flags();
    os << "bit_index,guess0_r,guess1_r,chosen,correct\n";
    os << std::fixed << std::setprecision(6);
    for (const BitResult &b : result.bits) {
        os << b.bit_index << ',' << b.max_abs_r[0] << ',' << b.max_abs_r[1]
           << ',' << b.chosen << ',';
        if (truth)
            os << ((b.chosen == 1) == truth->bit(b.bit_index) ? 1 : 0);
        os << '\n';
    }
    os << "# summary bits=" << result.bits.size()
       << " recovered=0x" << result.recovered_exponent().to_hex()
       << " mean_best_r=" << result.mean_best_r
       << " min_best_r=" << result.min_best_r
       << " max_best_r=" << result.max_best_r
       << " failed_bits=" << (result.any_failed ? "yes" : "no");
    if (truth)
        os << " accuracy=" << bit_accuracy(result, *truth);
    os << '\n';
    os.flags(flags);
}

} // namespace montlab::cpa
