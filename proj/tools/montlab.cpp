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

// montlab command-line front end.
//
// Exit codes: 0 success, 1 usage or unexpected error, 2 malformed input,
// 3 value outside the supported domain, 4 simulator protocol violation,
// 5 attack failure (undefined correlation), 6 file I/O.

#include "config.h"

#include "montlab/bigint.h"
#include "montlab/cpa.h"
#include "montlab/errors.h"
#include "montlab/hwsim.h"
#include "montlab/montgomery.h"
#include "montlab/rsa.h"
#include "montlab/sidechannel.h"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using namespace montlab;

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kParse = 2,
    kDomain = 3,
    kProtocol = 4,
    kAttackFailure = 5,
    kIo = 6,
};

struct Globals {
    std::string config_path;
    std::string seed;
    std::string key_path;
    std::string out_path;
    std::size_t n_traces = 0;
    bool make_protected = false;
    CLI::Option *n_traces_opt = nullptr;
    CLI::Option *protected_opt = nullptr;
};

/// Config file first, then the global flags on top.
cli::Config resolve(const Globals &g) {
    cli::Config cfg;
    if (!g.config_path.empty())
        cfg = cli::load_config(g.config_path);
    if (!g.seed.empty()) {
        if (g.seed == "auto") {
            cfg.seed = (std::uint64_t(std::random_device{}()) << 32) ^
                       std::random_device{}();
            std::cerr << "seed=" << cfg.seed << '\n';
        } else {
            cfg.seed = cli::parse_u64(g.seed, "--seed");
        }
    }
    if (!g.key_path.empty())
        cfg.key_path = g.key_path;
    if (!g.out_path.empty())
        cfg.out_path = g.out_path;
    if (g.n_traces_opt && g.n_traces_opt->count())
        cfg.n_traces = g.n_traces;
    if (g.protected_opt && g.protected_opt->count())
        cfg.make_protected = g.make_protected;
    cfg.validate();
    return cfg;
}

const std::string &require_key(const cli::Config &cfg) {
    if (cfg.key_path.empty())
        throw CLI::RequiredError("--key");
    return cfg.key_path;
}

std::ofstream open_out(const std::string &path) {
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot open '" + path + "' for writing");
    return f;
}

hwsim::Geometry geometry_for(const cli::Config &cfg, const BigUint &modulus) {
    hwsim::Geometry g;
    g.n = cfg.block_bits ? cfg.block_bits
                         : round_to_words<std::uint32_t>(modulus.bit_length());
    g.cfg = cfg.parallel;
    g.cfg.concurrent = false;
    g.validate();
    if (modulus.bit_length() > g.n)
        throw DomainError("modulus is wider than block_bits");
    return g;
}

BigUint parse_hex_arg(const std::string &text, const char *what) {
    try {
        return BigUint::from_hex(text);
    } catch (const montlab::ParseError &e) {
        throw montlab::ParseError(std::string(what) + ": " + e.what());
    }
}

/// The exponent the device applies: --exponent, else d with --private, else e.
BigUint device_exponent(const cli::Config &cfg, const std::string &exponent_hex,
                        bool use_private, BigUint *modulus) {
    if (use_private) {
        const auto key = rsa::read_private_key(require_key(cfg));
        *modulus = key.modulus;
        return exponent_hex.empty() ? key.d : parse_hex_arg(exponent_hex, "--exponent");
    }
    const auto key = rsa::read_public_key(require_key(cfg));
    *modulus = key.modulus;
    return exponent_hex.empty() ? key.exponent
                                : parse_hex_arg(exponent_hex, "--exponent");
}

int cmd_keygen(const cli::Config &cfg, std::size_t bits) {
    if (cfg.out_path.empty())
        throw CLI::RequiredError("--out");
    const auto pair = rsa::keygen_toy(bits, cfg.seed);
    const std::string pub = cfg.out_path + ".pub";
    const std::string priv = cfg.out_path + ".key";
    rsa::write_text_file(pub, rsa::format_public_key(pair.public_key));
    rsa::write_text_file(priv, rsa::format_private_key(pair.private_key));
    std::cout << "public=" << pub << "\nprivate=" << priv
              << "\nmodulus_bits=" << pair.public_key.modulus.bit_length() << '\n';
    return kOk;
}

void emit(const cli::Config &cfg, const std::string &text) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        return;
    }
    auto f = open_out(cfg.out_path);
    f << text;
}

int cmd_encrypt(const cli::Config &cfg, const std::string &message) {
    const auto key = rsa::read_public_key(require_key(cfg));
    const BigUint m = parse_hex_arg(message, "--message");
    emit(cfg, rsa::encrypt(m, key, cfg.parallel).to_hex() + "\n");
    return kOk;
}

int cmd_decrypt(const cli::Config &cfg, const std::string &ciphertext) {
    const auto key = rsa::read_private_key(require_key(cfg));
    const BigUint c = parse_hex_arg(ciphertext, "--ciphertext");
    emit(cfg, rsa::decrypt(c, key, cfg.parallel).to_hex() + "\n");
    return kOk;
}

int cmd_bench(const cli::Config &cfg, const std::vector<std::size_t> &sizes,
              const std::vector<unsigned> &digit_bits, std::size_t reps) {
    if (reps == 0)
        throw DomainError("--reps must be at least 1");
    std::ostringstream out;
    out << "n,partitions_k,digit_bits,word_radix_bits,iterations,reps,"
           "ns_per_op,matches_radix2\n";
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t n : sizes) {
        if (n < 8 || n % 32 != 0)
            throw DomainError("bench sizes must be positive multiples of 32");
        BigUint m = rsa::random_bits(rng, n);
        m.set_bit(n - 1);
        m.set_bit(0);
        const BigUint x = mod_reduce(rsa::random_bits(rng, n), m);
        const BigUint y = mod_reduce(rsa::random_bits(rng, n), m);
        for (unsigned d : digit_bits) {
            ParallelConfig pc = cfg.parallel;
            pc.digit_bits = d;
            pc.validate(n);
            const MontContext ctx(m, n, pc.word_radix_bits());
            const BigUint expect = mont_radix2(x, y, ctx);
            MontStats stats;
            BigUint z = mont_parallel(x, y, ctx, pc, &stats);
            const auto t0 = std::chrono::steady_clock::now();
            for (std::size_t r = 0; r < reps; ++r)
                z = mont_parallel(x, y, ctx, pc);
            const auto t1 = std::chrono::steady_clock::now();
            const double ns =
                std::chrono::duration<double, std::nano>(t1 - t0).count() /
                double(reps);
            out << n << ',' << pc.partitions_k << ',' << d << ','
                << pc.word_radix_bits() << ',' << stats.iterations << ','
                << reps << ',' << static_cast<long long>(ns) << ','
                << (z == expect ? 1 : 0) << '\n';
        }
    }
    emit(cfg, out.str());
    return kOk;
}

int cmd_simulate(const cli::Config &cfg, const std::string &message,
                 const std::string &exponent_hex, bool use_private,
                 const std::string &trace_out) {
    BigUint modulus;
    const BigUint e = device_exponent(cfg, exponent_hex, use_private, &modulus);
    const hwsim::Geometry g = geometry_for(cfg, modulus);
    const BigUint pt = parse_hex_arg(message, "--message");
    if (pt >= modulus)
        throw DomainError("message must be below the modulus");

    hwsim::Machine machine(g);
    machine.load_key(hwsim::key_bus_words(e, modulus, g.n));
    machine.load_data(hwsim::data_bus_words(pt, g.n));
    const hwsim::RunResult run = machine.run_rsa();

    if (!trace_out.empty()) {
        auto f = open_out(trace_out);
        hwsim::write_trace_csv(f, run.trace);
    }
    std::ostringstream out;
    out << "n=" << g.n << "\npartitions_k=" << g.cfg.partitions_k
        << "\ndigit_bits=" << g.cfg.digit_bits
        << "\nload_key_cycles=" << g.load_key_cycles()
        << "\nload_data_cycles=" << g.load_data_cycles()
        << "\nwork_cycles=" << g.work_cycles()
        << "\noutput_cycles=" << g.output_cycles()
        << "\nmont_ops=" << run.mont_ops
        << "\nexpected_mont_ops=" << rsa::mont_op_count(e)
        << "\ntotal_cycles=" << run.total_cycles
        << "\nexpected_total_cycles=" << g.total_cycles(run.mont_ops)
        << "\ntrace_rows=" << run.trace.records.size()
        << "\nciphertext=" << run.ciphertext.to_hex() << '\n';
    emit(cfg, out.str());
    return kOk;
}

int cmd_traces(const cli::Config &cfg, const std::string &exponent_hex,
               bool use_private) {
    if (cfg.out_path.empty())
        throw CLI::RequiredError("--out");
    BigUint modulus;
    const BigUint e = device_exponent(cfg, exponent_hex, use_private, &modulus);

    sidechannel::TraceGenConfig tg;
    tg.geometry = geometry_for(cfg, modulus);
    tg.n_traces = cfg.n_traces;
    tg.seed = cfg.seed;
    tg.unit = cfg.power_unit;
    tg.baseline = cfg.power_baseline;
    tg.make_protected = cfg.make_protected;
    tg.amplitude = cfg.noise_amplitude;
    tg.calibration_ratio = cfg.noise_ratio;
    tg.distribution = cfg.noise_distribution;
    const auto gen = sidechannel::generate_traces(e, modulus, tg);

    const auto &set = cfg.make_protected ? gen.protected_set : gen.clean;
    auto f = open_out(cfg.out_path);
    sidechannel::write_trace_set(f, set);
    std::cout << "traces=" << set.size() << "\nsamples=" << set.length()
              << "\nprotected=" << (cfg.make_protected ? 1 : 0);
    if (cfg.make_protected)
        std::cout << "\nnoise_amplitude=" << gen.amplitude
                  << "\nnoise_distribution="
                  << sidechannel::to_string(cfg.noise_distribution);
    std::cout << "\nmont_ops=" << rsa::mont_op_count(e) << '\n';
    return kOk;
}

int cmd_attack(const cli::Config &cfg, const std::string &traces_path,
               std::size_t bits, const std::string &truth_hex) {
    const auto key = rsa::read_public_key(require_key(cfg));
    std::ifstream in(traces_path);
    if (!in)
        throw IoError("cannot open trace set '" + traces_path + "'");
    const sidechannel::TraceSet ts = sidechannel::read_trace_set(in);

    std::optional<BigUint> truth;
    if (!truth_hex.empty())
        truth = parse_hex_arg(truth_hex, "--truth");
    if (bits == 0) {
        if (!truth)
            throw CLI::RequiredError("--bits (or --truth)");
        bits = truth->bit_length();
    }
    cpa::AttackTarget target{key.modulus, geometry_for(cfg, key.modulus)};
    const cpa::AttackResult res = cpa::attack_exponent(ts, target, bits);

    std::ostringstream report;
    cpa::write_report_csv(report, res, truth);
    emit(cfg, report.str());
    if (!cfg.out_path.empty()) {
        const std::string s = report.str();
        std::cout << s.substr(s.rfind("# summary"));
    }
    if (res.any_failed) {
        std::cerr << "montlab: correlation undefined for at least one bit\n";
        return kAttackFailure;
    }
    return kOk;
}

int cmd_randtest(const cli::Config &cfg, std::size_t length) {
    const auto bits = sidechannel::random_bitstream(cfg.seed, length);
    const auto rep = sidechannel::randomness_tests(bits);
    std::ostringstream out;
    out << "seed=" << cfg.seed << "\nlength=" << length
        << "\nmonobit_statistic=" << rep.monobit.statistic
        << "\nmonobit_p=" << rep.monobit.p_value
        << "\nmonobit=" << (rep.monobit.passed ? "PASS" : "FAIL")
        << "\nruns_statistic=" << rep.runs.statistic
        << "\nruns_p=" << rep.runs.p_value
        << "\nruns=" << (rep.runs.passed ? "PASS" : "FAIL") << '\n';
    emit(cfg, out.str());
    return kOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"montlab: Montgomery arithmetic, a cycle-level RSA processor "
                 "model and a correlation power analysis lab"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config_path, "key=value settings file");
    app.add_option("--seed", g.seed, "random seed, or 'auto'");
    app.add_option("--key", g.key_path, "key file");
    app.add_option("--out", g.out_path, "output path");
    g.n_traces_opt =
        app.add_option("--n-traces", g.n_traces, "traces to generate (default 100)");
    g.protected_opt =
        app.add_flag("--protected", g.make_protected, "apply the noise countermeasure");

    std::size_t key_bits = 64;
    auto *keygen = app.add_subcommand("keygen", "generate a toy RSA key pair");
    keygen->add_option("--bits", key_bits, "modulus size in bits")->capture_default_str();

    std::string message, ciphertext;
    auto *encrypt = app.add_subcommand("encrypt", "RSA-encrypt a hex message");
    encrypt->add_option("--message", message, "plaintext (hex)")->required();
    auto *decrypt = app.add_subcommand("decrypt", "RSA-decrypt a hex ciphertext");
    decrypt->add_option("--ciphertext", ciphertext, "ciphertext (hex)")->required();

    std::vector<std::size_t> sizes{64, 256, 1024};
    std::vector<unsigned> digits{2, 4};
    std::size_t reps = 20;
    auto *bench = app.add_subcommand("bench-mont",
                                     "iteration counts and timing of the "
                                     "partitioned multiplier");
    bench->add_option("--sizes", sizes, "block sizes n")->delimiter(',')->capture_default_str();
    bench->add_option("--digit-bits", digits, "per-core digit widths")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--reps", reps, "repetitions per timing")->capture_default_str();

    std::string exponent_hex, trace_out;
    bool use_private = false;
    auto *simulate = app.add_subcommand("simulate", "run one encryption on the "
                                                    "cycle-level model");
    simulate->add_option("--message", message, "plaintext (hex)")->required();
    simulate->add_option("--exponent", exponent_hex, "exponent to load (hex)");
    simulate->add_flag("--private", use_private, "load the private exponent");
    simulate->add_option("--trace-out", trace_out, "per-cycle toggle CSV");

    auto *traces = app.add_subcommand("traces", "generate a power trace set");
    traces->add_option("--exponent", exponent_hex, "exponent to load (hex)");
    traces->add_flag("--private", use_private, "load the private exponent");
    std::string noise_amplitude;
    traces->add_option("--noise-amplitude", noise_amplitude,
                       "fixed noise amplitude (default: calibrated)");

    std::string traces_path, truth_hex;
    std::size_t attack_bits = 0;
    auto *attack = app.add_subcommand("attack", "CPA against a trace set");
    attack->add_option("--traces", traces_path, "trace set CSV")->required();
    attack->add_option("--bits", attack_bits, "exponent bits to recover");
    attack->add_option("--truth", truth_hex, "known exponent (hex) for scoring");

    std::size_t length = 20000;
    auto *randtest = app.add_subcommand("randtest", "monobit and runs tests on "
                                                    "the noise bit stream");
    randtest->add_option("--length", length, "stream length in bits")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        cli::Config cfg = resolve(g);
        if (*keygen)
            return cmd_keygen(cfg, key_bits);
        if (*encrypt)
            return cmd_encrypt(cfg, message);
        if (*decrypt)
            return cmd_decrypt(cfg, ciphertext);
        if (*bench)
            return cmd_bench(cfg, sizes, digits, reps);
        if (*simulate)
            return cmd_simulate(cfg, message, exponent_hex, use_private,
                                trace_out);
        if (*traces) {
            if (!noise_amplitude.empty())
                cfg.noise_amplitude =
                    cli::parse_double(noise_amplitude, "--noise-amplitude");
            cfg.validate();
            return cmd_traces(cfg, exponent_hex, use_private);
        }
        if (*attack)
            return cmd_attack(cfg, traces_path, attack_bits, truth_hex);
        if (*randtest)
            return cmd_randtest(cfg, length);
    } catch (const CLI::RequiredError &e) {
        std::cerr << "montlab: missing required option " << e.what() << '\n';
        return kUsage;
    } catch (const montlab::ParseError &e) {
        std::cerr << "montlab: parse error: " << e.what() << '\n';
        return kParse;
    } catch (const DomainError &e) {
        std::cerr << "montlab: domain error: " << e.what() << '\n';
        return kDomain;
    } catch (const KeygenError &e) {
        std::cerr << "montlab: key generation failed: " << e.what() << '\n';
        return kDomain;
    } catch (const ProtocolError &e) {
        std::cerr << "montlab: protocol error: " << e.what() << '\n';
        return kProtocol;
    } catch (const UndefinedCorrelation &e) {
        std::cerr << "montlab: attack failed: " << e.what() << '\n';
        return kAttackFailure;
    } catch (const IoError &e) {
        std::cerr << "montlab: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception &e) {
        std::cerr << "montlab: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
