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

// Cycle-level model of the quad-core RSA processor: a top-level FSM that
// loads key material and data over a 32-bit bus and sequences the
// exponentiation, a Montgomery block that feeds the multiplier to the cores
// word_radix_bits at a time, and one accumulator datapath per core. Every
// cycle yields a record of the register bits that toggled.
//
// Bus layout of the key load (one 32-bit word per cycle, least significant
// word of each register first):
//   words [0, W)    exponent register (the key applied by the multiply step)
//   words [W, 2W)   modulus M; Mprime is derived from its low word on load
//   words [2W, 3W)  mapping constant C = 2^2n mod M
// where W = n / 32. At n = 1024 this is the 96-cycle LOAD_KEY phase.

#include "montlab/bigint.h"
#include "montlab/montgomery.h"
#include "montlab/rsa.h"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace montlab::hwsim {

enum class TopState : std::uint8_t {
    Idle,
    LoadKey,
    LoadData,
    Mont1,
    Mont2,
    Mont3,
    Mont4,
    Mont5,
    Done,
};

enum class MontState : std::uint8_t { Init, Work, Done };

const char *to_string(TopState s);
const char *to_string(MontState s);

/// Whether the top FSM may move from `from` to `to` at a state boundary.
bool is_allowed_transition(TopState from, TopState to);

/// INIT and DONE cycles around every Montgomery operation.
inline constexpr std::size_t kHandshakeCycles = 2;
/// Core columns in a cycle record.
inline constexpr std::size_t kMaxCores = 8;

struct Geometry {
    std::size_t n = 1024;
    ParallelConfig cfg{};

    std::size_t bus_words() const { return n / 32; }
    std::size_t load_key_cycles() const { return 3 * bus_words(); }
    std::size_t load_data_cycles() const { return bus_words(); }
    std::size_t output_cycles() const { return bus_words(); }
    std::size_t work_cycles() const { return cfg.iterations(n); }
    std::size_t mont_op_cycles() const { return work_cycles() + kHandshakeCycles; }
    /// Cycles before the first Montgomery operation of a key+data+run sequence.
    std::size_t preamble_cycles() const {
        return load_key_cycles() + load_data_cycles();
    }
    /// Cycle budget of load_key, load_data and run_rsa back to back.
    std::size_t total_cycles(std::size_t mont_ops) const {
        return preamble_cycles() + mont_ops * mont_op_cycles() + output_cycles();
    }

    /// n a positive multiple of 32, cfg valid for n, at most kMaxCores cores.
    void validate() const;
};

struct CycleRecord {
    std::uint64_t cycle = 0;
    TopState top = TopState::Idle;
    MontState mont = MontState::Init;
    std::array<std::uint32_t, kMaxCores> core{};
    std::uint32_t xm = 0;
    /// Top-level registers: key material, plaintext, P, R, ciphertext.
    std::uint32_t acc = 0;
    std::uint32_t total = 0;
};

struct SimTrace {
    std::size_t cores = 4;
    std::vector<CycleRecord> records;
};

/// CSV with header
/// cycle,top_state,mont_state,toggles_total,toggles_core0..,toggles_xm,toggles_acc
void write_trace_csv(std::ostream &os, const SimTrace &trace);

/// Cycles [begin, end) occupied by one Montgomery operation.
struct OpWindow {
    std::size_t begin = 0;
    std::size_t end = 0;
    rsa::ExpOp op = rsa::ExpOp::MapPlaintext;
};

/// Window of the op_index-th Montgomery operation when the machine ran
/// load_key, load_data and run_rsa from a fresh start. Depends only on the
/// geometry, since every operation takes the same number of cycles.
OpWindow op_window(const Geometry &g, std::size_t op_index);

struct RunResult {
    BigUint ciphertext;
    std::size_t total_cycles = 0;
    std::size_t mont_ops = 0;
    SimTrace trace;
    std::vector<OpWindow> op_windows;
    std::vector<std::uint32_t> output_words;
};

/// Snapshot of the architectural registers.
struct Registers {
    BigUint exponent;
    BigUint modulus;
    BigUint r2;
    std::uint32_t mprime = 0;
    BigUint plaintext;
    BigUint p;
    BigUint r;
    BigUint ciphertext;
};

/// Serialize a key for LOAD_KEY; computes C = 2^2n mod M.
std::vector<std::uint32_t> key_bus_words(const BigUint &exponent,
                                         const BigUint &modulus, std::size_t n);
std::vector<std::uint32_t> data_bus_words(const BigUint &plaintext,
                                          std::size_t n);

/// Value of the sel pins when the machine is idle.
enum class Select : std::uint8_t { LoadKey = 0b01, LoadData = 0b10, Start = 0b11 };

class Machine {
  public:
    explicit Machine(Geometry geometry = {});

    /// Issue a command from IDLE. LoadKey and LoadData take the bus words the
    /// state will consume; Start needs both loads done. The state is entered
    /// on the next step(). Throws ProtocolError when out of sequence.
    void select(Select sel, std::span<const std::uint32_t> bus = {});

    /// Advance one clock cycle. Throws ProtocolError once the output has been
    /// streamed, until reset().
    CycleRecord step();

    /// select(LoadKey) and step through the 3W load cycles.
    void load_key(std::span<const std::uint32_t> words);
    /// select(LoadData) and step through the W load cycles.
    void load_data(std::span<const std::uint32_t> words);
    /// select(Start) and step until the ciphertext has been streamed out.
    RunResult run_rsa();

    /// Return to IDLE. Loaded registers and the trace are kept.
    void reset();

    TopState top_state() const { return top_; }
    MontState mont_state() const { return mont_; }
    bool ready() const { return top_ == TopState::Done; }
    std::uint64_t cycle() const { return cycle_; }
    const Geometry &geometry() const { return geom_; }
    const Registers &registers() const { return regs_; }
    const SimTrace &trace() const { return trace_; }

    /// Bus words that would reproduce the current key / data registers.
    std::vector<std::uint32_t> key_words() const;
    std::vector<std::uint32_t> data_words() const;

    /// Bit widths used to bound the per-group toggle counts.
    std::size_t core_register_bits() const;
    std::size_t acc_register_bits() const;

  private:
    enum class Dest : std::uint8_t { P, R, Ciphertext };

    void enter(TopState next);
    void begin_op();
    void load_cycle(CycleRecord &rec);
    void mont_cycle(CycleRecord &rec);
    void finish_op(CycleRecord &rec);
    void output_cycle();

    Geometry geom_;
    Registers regs_;
    TopState top_ = TopState::Idle;
    MontState mont_ = MontState::Init;
    std::uint64_t cycle_ = 0;
    SimTrace trace_;

    std::vector<std::uint32_t> bus_;
    std::size_t bus_pos_ = 0;
    std::size_t out_pos_ = 0;
    bool key_loaded_ = false;
    bool data_loaded_ = false;
    bool finished_ = false;

    // Montgomery block and cores, live during a run.
    std::vector<PartitionCore> cores_;
    BigUint xm_;
    BigUint op_x_;
    BigUint op_y_;
    Dest dest_ = Dest::P;
    std::size_t work_count_ = 0;

    // Exponent sequencing.
    std::size_t bit_index_ = 0;
    std::size_t exp_len_ = 0;
    std::size_t op_count_ = 0;
    std::vector<OpWindow> windows_;
    std::vector<std::uint32_t> output_;
};

} // namespace montlab::hwsim
