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

#include "montlab/hwsim.h"

#include "montlab/detail/limbs.h"
#include "montlab/errors.h"

#include <bit>
#include <ostream>
#include <string>

namespace montlab::hwsim {

namespace {

std::uint32_t neg_inv_word(std::uint32_t low, unsigned bits) {
    if ((low & 1u) == 0)
        return 0;
    std::uint32_t inv = 1;
    for (int i = 0; i < 5; ++i)
        inv *= 2u - low * inv;
    const std::uint32_t mask = bits >= 32 ? ~std::uint32_t(0)
                                          : (std::uint32_t(1) << bits) - 1;
    return (0u - inv) & mask;
}

std::uint32_t toggles(const BigUint &a, const BigUint &b) {
    return static_cast<std::uint32_t>(hamming_distance(a, b));
}

rsa::ExpOp op_of(TopState s) {
    switch (s) {
    case TopState::Mont1: return rsa::ExpOp::MapPlaintext;
    case TopState::Mont2: return rsa::ExpOp::MapOne;
    case TopState::Mont3: return rsa::ExpOp::Multiply;
    case TopState::Mont4: return rsa::ExpOp::Square;
    case TopState::Mont5: return rsa::ExpOp::Remap;
    default: break;
    }
    throw InvariantError(std::string("no Montgomery operation in state ") +
                         to_string(s));
}

std::vector<std::uint32_t> to_bus(const BigUint &v, std::size_t n) {
    const BigUint r = v.resized(n);
    return {r.words().begin(), r.words().end()};
}

} // namespace

const char *to_string(TopState s) {
    switch (s) {
    case TopState::Idle: return "IDLE";
    case TopState::LoadKey: return "LOAD_KEY";
    case TopState::LoadData: return "LOAD_DATA";
    case TopState::Mont1: return "MONT1";
    case TopState::Mont2: return "MONT2";
    case TopState::Mont3: return "MONT3";
    case TopState::Mont4: return "MONT4";
    case TopState::Mont5: return "MONT5";
    case TopState::Done: return "DONE";
    }
    return "?";
}

const char *to_string(MontState s) {
    switch (s) {
    case MontState::Init: return "INIT";
    case MontState::Work: return "WORK";
    case MontState::Done: return "DONE";
    }
    return "?";
}

bool is_allowed_transition(TopState from, TopState to) {
    using T = TopState;
    switch (from) {
    case T::Idle:
        return to == T::LoadKey || to == T::LoadData || to == T::Mont1;
    case T::LoadKey:
    case T::LoadData:
        return to == T::Idle;
    case T::Mont1:
        return to == T::Mont2;
    case T::Mont2:
        return to == T::Mont3 || to == T::Mont4;
    case T::Mont3:
        return to == T::Mont4;
    case T::Mont4:
        return to == T::Mont3 || to == T::Mont4 || to == T::Mont5;
    case T::Mont5:
        return to == T::Done;
    case T::Done:
        return to == T::Idle;
    }
    return false;
}

void Geometry::validate() const {
    if (n == 0 || n % 32 != 0)
        throw DomainError("block size n must be a positive multiple of 32");
    cfg.validate(n);
    if (cfg.partitions_k > kMaxCores)
        throw DomainError("the simulator models at most " +
                          std::to_string(kMaxCores) + " cores");
}

void write_trace_csv(std::ostream &os, const SimTrace &trace) {
    os << "cycle,top_state,mont_state,toggles_total";
    for (std::size_t j = 0; j < trace.cores; ++j)
        os << ",toggles_core" << j;
    os << ",toggles_xm,toggles_acc\n";
    for (const CycleRecord &r : trace.records) {
        os << r.cycle << ',' << to_string(r.top) << ',' << to_string(r.mont)
           << ',' << r.total;
        for (std::size_t j = 0; j < trace.cores; ++j)
            os << ',' << r.core[j];
        os << ',' << r.xm << ',' << r.acc << '\n';
    }
}

OpWindow op_window(const Geometry &g, std::size_t op_index) {
    OpWindow w;
    w.begin = g.preamble_cycles() + op_index * g.mont_op_cycles();
    w.end = w.begin + g.mont_op_cycles();
    return w;
}

std::vector<std::uint32_t> key_bus_words(const BigUint &exponent,
                                         const BigUint &modulus, std::size_t n) {
    if (modulus.bit_length() > n || exponent.bit_length() > n)
        throw DomainError("key does not fit the " + std::to_string(n) +
                          "-bit datapath");
    if (modulus.is_zero())
        throw DomainError("modulus must be nonzero");
    const BigUint c = mod_reduce(BigUint::power_of_two(2 * n), modulus);
    std::vector<std::uint32_t> out = to_bus(exponent, n);
    const auto m = to_bus(modulus, n);
    const auto cw = to_bus(c, n);
    out.insert(out.end(), m.begin(), m.end());
    out.insert(out.end(), cw.begin(), cw.end());
    return out;
}

std::vector<std::uint32_t> data_bus_words(const BigUint &plaintext,
                                          std::size_t n) {
    if (plaintext.bit_length() > n)
        throw DomainError("plaintext does not fit the " + std::to_string(n) +
                          "-bit datapath");
    return to_bus(plaintext, n);
}

Machine::Machine(Geometry geometry) : geom_(geometry) {
    geom_.validate();
    const std::size_t n = geom_.n;
    regs_.exponent = BigUint(n);
    regs_.modulus = BigUint(n);
    regs_.r2 = BigUint(n);
    regs_.plaintext = BigUint(n);
    regs_.p = BigUint(n);
    regs_.r = BigUint(n);
    regs_.ciphertext = BigUint(n);
    xm_ = BigUint(n);
    trace_.cores = geom_.cfg.partitions_k;
}

std::size_t Machine::core_register_bits() const {
    return geom_.n + geom_.cfg.word_radix_bits() + 2;
}

std::size_t Machine::acc_register_bits() const {
    return 7 * geom_.n + geom_.cfg.word_radix_bits();
}

void Machine::enter(TopState next) {
    if (!is_allowed_transition(top_, next))
        throw InvariantError(std::string("illegal transition ") +
                             to_string(top_) + " -> " + to_string(next));
    top_ = next;
}

void Machine::select(Select sel, std::span<const std::uint32_t> bus) {
    if (top_ != TopState::Idle)
        throw ProtocolError(std::string("command issued in state ") +
                            to_string(top_) + "; the machine accepts commands "
                            "only when IDLE");
    switch (sel) {
    case Select::LoadKey:
        if (bus.size() != geom_.load_key_cycles())
            throw ProtocolError("LOAD_KEY expects " +
                                std::to_string(geom_.load_key_cycles()) +
                                " bus words, got " + std::to_string(bus.size()));
        bus_.assign(bus.begin(), bus.end());
        bus_pos_ = 0;
        key_loaded_ = false;
        enter(TopState::LoadKey);
        return;
    case Select::LoadData:
        if (bus.size() != geom_.load_data_cycles())
            throw ProtocolError("LOAD_DATA expects " +
                                std::to_string(geom_.load_data_cycles()) +
                                " bus words, got " + std::to_string(bus.size()));
        bus_.assign(bus.begin(), bus.end());
        bus_pos_ = 0;
        data_loaded_ = false;
        enter(TopState::LoadData);
        return;
    case Select::Start:
        break;
    }

    if (!key_loaded_)
        throw ProtocolError("start requested before a key was loaded");
    if (!data_loaded_)
        throw ProtocolError("start requested before data was loaded");
    const BigUint &m = regs_.modulus;
    if (!m.is_odd() || m.bit_length() < 2)
        throw ProtocolError("loaded modulus must be odd and greater than 1");
    if (regs_.exponent.is_zero())
        throw ProtocolError("loaded exponent is zero");
    if (regs_.plaintext >= m)
        throw ProtocolError("plaintext must be below the modulus");
    if (regs_.r2 >= m)
        throw ProtocolError("mapping constant must be below the modulus");

    const MontContext ctx(m, geom_.n, geom_.cfg.word_radix_bits());
    cores_.clear();
    for (std::size_t j = 0; j < geom_.cfg.partitions_k; ++j)
        cores_.emplace_back(ctx, geom_.cfg, j);
    exp_len_ = regs_.exponent.bit_length();
    bit_index_ = 0;
    op_count_ = 0;
    out_pos_ = 0;
    windows_.clear();
    output_.clear();
    finished_ = false;
    enter(TopState::Mont1);
    begin_op();
}

void Machine::begin_op() {
    const std::size_t n = geom_.n;
    const BigUint one = mod_reduce(BigUint::from_u64(1, n), regs_.modulus);
    switch (top_) {
    case TopState::Mont1:
        op_x_ = regs_.r2, op_y_ = regs_.plaintext, dest_ = Dest::P;
        break;
    case TopState::Mont2:
        op_x_ = regs_.r2, op_y_ = one, dest_ = Dest::R;
        break;
    case TopState::Mont3:
        op_x_ = regs_.r, op_y_ = regs_.p, dest_ = Dest::R;
        break;
    case TopState::Mont4:
        op_x_ = regs_.p, op_y_ = regs_.p, dest_ = Dest::P;
        break;
    case TopState::Mont5:
        op_x_ = one, op_y_ = regs_.r, dest_ = Dest::Ciphertext;
        break;
    default:
        throw InvariantError("begin_op outside a Montgomery state");
    }
    op_x_ = op_x_.resized(n);
    mont_ = MontState::Init;
}

CycleRecord Machine::step() {
    if (finished_)
        throw ProtocolError("the result has been streamed out; reset before "
                            "stepping again");
    CycleRecord rec;
    rec.cycle = cycle_;
    rec.top = top_;
    rec.mont = mont_;
    switch (top_) {
    case TopState::Idle:
        break;
    case TopState::LoadKey:
    case TopState::LoadData:
        load_cycle(rec);
        break;
    case TopState::Mont1:
    case TopState::Mont2:
    case TopState::Mont3:
    case TopState::Mont4:
    case TopState::Mont5:
        mont_cycle(rec);
        break;
    case TopState::Done:
        output_cycle();
        break;
    }
    rec.total = rec.xm + rec.acc;
    for (std::size_t j = 0; j < geom_.cfg.partitions_k; ++j)
        rec.total += rec.core[j];
    trace_.records.push_back(rec);
    ++cycle_;
    return rec;
}

void Machine::load_cycle(CycleRecord &rec) {
    const std::size_t words = geom_.bus_words();
    const std::size_t index = bus_pos_;
    const std::uint32_t value = bus_[bus_pos_++];
    const std::size_t block = index / words;
    const std::size_t wi = index % words;

    BigUint *target = &regs_.plaintext;
    if (top_ == TopState::LoadKey)
        target = block == 0 ? &regs_.exponent
                 : block == 1 ? &regs_.modulus
                              : &regs_.r2;
    std::uint32_t &slot = target->words_mut()[wi];
    rec.acc += std::popcount(slot ^ value);
    slot = value;

    if (top_ == TopState::LoadKey && block == 1 && wi == 0) {
        const std::uint32_t mp =
            neg_inv_word(value, geom_.cfg.word_radix_bits());
        rec.acc += std::popcount(regs_.mprime ^ mp);
        regs_.mprime = mp;
    }

    if (bus_pos_ == bus_.size()) {
        if (top_ == TopState::LoadKey)
            key_loaded_ = true;
        else
            data_loaded_ = true;
        bus_.clear();
        enter(TopState::Idle);
    }
}

void Machine::mont_cycle(CycleRecord &rec) {
    switch (mont_) {
    case MontState::Init: {
        windows_.push_back({static_cast<std::size_t>(rec.cycle), 0, op_of(top_)});
        rec.xm = toggles(xm_, op_x_);
        xm_ = op_x_;
        for (std::size_t j = 0; j < cores_.size(); ++j) {
            rec.core[j] = static_cast<std::uint32_t>(
                cores_[j].accumulator().popcount());
            cores_[j].start(op_y_);
        }
        work_count_ = 0;
        mont_ = MontState::Work;
        return;
    }
    case MontState::Work: {
        const unsigned d = geom_.cfg.digit_bits;
        for (std::size_t j = 0; j < cores_.size(); ++j) {
            const BigUint before = cores_[j].accumulator();
            cores_[j].step(static_cast<std::uint32_t>(xm_.bits(d * j, d)));
            rec.core[j] = toggles(before, cores_[j].accumulator());
        }
        const BigUint shifted = shift_right(xm_, geom_.cfg.word_radix_bits());
        rec.xm = toggles(xm_, shifted);
        xm_ = shifted;
        if (++work_count_ == geom_.work_cycles())
            mont_ = MontState::Done;
        return;
    }
    case MontState::Done:
        finish_op(rec);
        return;
    }
}

void Machine::finish_op(CycleRecord &rec) {
    const std::size_t n = geom_.n;
    const std::size_t k = cores_.size();
    BigUint sum(n + 32);
    for (const PartitionCore &core : cores_)
        detail::add_into<std::uint32_t>(sum.words_mut(),
                                        core.partial_product().words());
    reduce_below(sum, regs_.modulus, k > 1 ? k - 1 : 1);
    const BigUint result = sum.resized(n);

    BigUint &dest = dest_ == Dest::P   ? regs_.p
                    : dest_ == Dest::R ? regs_.r
                                       : regs_.ciphertext;
    rec.acc += toggles(dest, result);
    dest = result;
    windows_.back().end = static_cast<std::size_t>(rec.cycle) + 1;
    ++op_count_;

    switch (top_) {
    case TopState::Mont1:
        enter(TopState::Mont2);
        break;
    case TopState::Mont2:
    case TopState::Mont3:
        // Both mapping operations are done (MONT2) or the multiply for the
        // current bit is (MONT3): square next, unless MONT2 sees a set bit.
        if (top_ == TopState::Mont2 && regs_.exponent.bit(0))
            enter(TopState::Mont3);
        else
            enter(TopState::Mont4);
        break;
    case TopState::Mont4:
        if (++bit_index_ == exp_len_)
            enter(TopState::Mont5);
        else if (regs_.exponent.bit(bit_index_))
            enter(TopState::Mont3);
        else
            enter(TopState::Mont4);
        break;
    case TopState::Mont5:
        enter(TopState::Done);
        mont_ = MontState::Init;
        return;
    default:
        throw InvariantError("Montgomery operation finished outside MONT1..5");
    }
    begin_op();
}

void Machine::output_cycle() {
    output_.push_back(regs_.ciphertext.word(out_pos_++));
    if (out_pos_ == geom_.output_cycles())
        finished_ = true;
}

void Machine::load_key(std::span<const std::uint32_t> words) {
    select(Select::LoadKey, words);
    while (top_ == TopState::LoadKey)
        step();
}

void Machine::load_data(std::span<const std::uint32_t> words) {
    select(Select::LoadData, words);
    while (top_ == TopState::LoadData)
        step();
}

RunResult Machine::run_rsa() {
    select(Select::Start);
    while (!finished_)
        step();
    RunResult out;
    out.ciphertext = regs_.ciphertext;
    out.total_cycles = static_cast<std::size_t>(cycle_);
    out.mont_ops = op_count_;
    out.trace = trace_;
    out.op_windows = windows_;
    out.output_words = output_;
    return out;
}

void Machine::reset() {
    top_ = TopState::Idle;
    mont_ = MontState::Init;
    bus_.clear();
    bus_pos_ = 0;
    finished_ = false;
}

std::vector<std::uint32_t> Machine::key_words() const {
    std::vector<std::uint32_t> out = to_bus(regs_.exponent, geom_.n);
    const auto m = to_bus(regs_.modulus, geom_.n);
    const auto c = to_bus(regs_.r2, geom_.n);
    out.insert(out.end(), m.begin(), m.end());
    out.insert(out.end(), c.begin(), c.end());
    return out;
}

std::vector<std::uint32_t> Machine::data_words() const {
    return to_bus(regs_.plaintext, geom_.n);
}

} // namespace montlab::hwsim
