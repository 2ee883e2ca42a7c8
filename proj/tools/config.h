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

#include "montlab/montgomery.h"
#include "montlab/sidechannel.h"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace montlab::cli {

/// Settings shared by the subcommands. A config file holds `key = value`
/// lines using the names accepted by apply_setting; command-line flags
/// override it.
struct Config {
    ParallelConfig parallel{};
    /// Datapath width in bits; 0 picks the modulus length rounded up to
    /// whole 32-bit words.
    std::size_t block_bits = 0;
    std::size_t n_traces = 100;
    std::uint64_t seed = 1;
    double power_unit = 1.0;
    double power_baseline = 0.0;
    /// Fixed noise amplitude; calibrated from the clean traces when unset.
    std::optional<double> noise_amplitude;
    double noise_ratio = 2.0;
    sidechannel::NoiseDistribution noise_distribution =
        sidechannel::NoiseDistribution::BitstreamScaled;
    bool make_protected = false;
    std::string key_path;
    std::string out_path;

    /// Throws DomainError naming the first violated constraint.
    void validate() const;
};

/// Set one field by name. Throws ParseError for unknown names or values
/// that do not parse.
void apply_setting(Config &cfg, std::string_view key, std::string_view value);

/// Parse a whole config file; blank lines and `#` comments are ignored.
Config parse_config(std::string_view text, Config base = {});
Config load_config(const std::string &path, Config base = {});

std::uint64_t parse_u64(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);
double parse_double(std::string_view text, std::string_view what);

} // namespace montlab::cli
