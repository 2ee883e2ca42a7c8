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

#include "config.h"

#include "montlab/errors.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace montlab::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

} // namespace

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() ||
        res.ptr != text.data() + text.size())
        throw ParseError(std::string(what) + ": expected a non-negative "
                         "integer, got " + quoted(text));
    return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
    if (text == "1" || text == "true" || text == "yes" || text == "on")
        return true;
    if (text == "0" || text == "false" || text == "no" || text == "off")
        return false;
    throw ParseError(std::string(what) + ": expected a boolean, got " +
                     quoted(text));
}

double parse_double(std::string_view text, std::string_view what) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() ||
        res.ptr != text.data() + text.size() || !std::isfinite(v))
        throw ParseError(std::string(what) + ": expected a number, got " +
                         quoted(text));
    return v;
}

void Config::validate() const {
    parallel.validate();
    if (block_bits != 0) {
        if (block_bits % 32 != 0)
            throw DomainError("block_bits must be a multiple of 32");
        parallel.validate(block_bits);
    }
    if (n_traces == 0)
        throw DomainError("n_traces must be at least 1");
    if (!(power_unit > 0.0))
        throw DomainError("power_unit must be positive");
    if (noise_amplitude && *noise_amplitude < 0.0)
        throw DomainError("noise_amplitude must be non-negative");
    if (noise_ratio < 0.0)
        throw DomainError("noise_ratio must be non-negative");
}

void apply_setting(Config &cfg, std::string_view key, std::string_view value) {
    if (key == "partitions_k")
        cfg.parallel.partitions_k = unsigned(parse_u64(value, key));
    else if (key == "digit_bits")
        cfg.parallel.digit_bits = unsigned(parse_u64(value, key));
    else if (key == "concurrent")
        cfg.parallel.concurrent = parse_bool(value, key);
    else if (key == "block_bits")
        cfg.block_bits = parse_u64(value, key);
    else if (key == "n_traces")
        cfg.n_traces = parse_u64(value, key);
    else if (key == "seed")
        cfg.seed = parse_u64(value, key);
    else if (key == "power_unit")
        cfg.power_unit = parse_double(value, key);
    else if (key == "power_baseline")
        cfg.power_baseline = parse_double(value, key);
    else if (key == "noise_amplitude")
        cfg.noise_amplitude = parse_double(value, key);
    else if (key == "noise_ratio")
        cfg.noise_ratio = parse_double(value, key);
    else if (key == "noise_distribution")
        cfg.noise_distribution =
            sidechannel::parse_distribution(std::string(value));
    else if (key == "protected")
        cfg.make_protected = parse_bool(value, key);
    else if (key == "key")
        cfg.key_path = std::string(value);
    else if (key == "out")
        cfg.out_path = std::string(value);
    else
        throw ParseError("unknown setting " + quoted(key));
}

Config parse_config(std::string_view text, Config base) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("config line " + std::to_string(lineno) +
                             ": expected key = value");
        try {
            apply_setting(base, trim(line.substr(0, eq)),
                          trim(line.substr(eq + 1)));
        } catch (const ParseError &e) {
            throw ParseError("config line " + std::to_string(lineno) + ": " +
                             e.what());
        }
    }
    return base;
}

Config load_config(const std::string &path, Config base) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open config file " + quoted(path));
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

} // namespace montlab::cli
