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

#include <fstream>
#include <map>
#include <sstream>

namespace montlab::rsa {

namespace {

using Fields = std::map<std::string, BigUint, std::less<>>;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

Fields parse_fields(std::string_view text) {
    Fields fields;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{}
                                            : text.substr(nl + 1);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("key file line " + std::to_string(line_no) +
                             ": expected name=<hex>");
        const std::string name(trim(line.substr(0, eq)));
        if (name != "n" && name != "e" && name != "d" && name != "p" &&
            name != "q")
            throw ParseError("key file line " + std::to_string(line_no) +
                             ": unknown field '" + name + "'");
        if (fields.count(name))
            throw ParseError("key file: duplicate field '" + name + "'");
        fields.emplace(name, BigUint::from_hex(trim(line.substr(eq + 1))));
    }
    return fields;
}

const BigUint &require(const Fields &f, const char *name) {
    const auto it = f.find(name);
    if (it == f.end())
        throw ParseError(std::string("key file: missing field '") + name + "'");
    return it->second;
}

} // namespace

std::string format_public_key(const RsaPublicKey &key) {
    return "n=" + key.modulus.to_hex() + "\ne=" + key.exponent.to_hex() + "\n";
}

std::string format_private_key(const RsaPrivateKey &key) {
    std::string s = "n=" + key.modulus.to_hex() +
                    "\ne=" + key.public_exponent.to_hex() +
                    "\nd=" + key.d.to_hex() + "\n";
    if (key.p && key.q)
        s += "p=" + key.p->to_hex() + "\nq=" + key.q->to_hex() + "\n";
    return s;
}

RsaPublicKey parse_public_key(std::string_view text) {
    const Fields f = parse_fields(text);
    const BigUint &n = require(f, "n");
    RsaPublicKey key{n, require(f, "e").resized(n.bit_width())};
    key.validate();
    return key;
}

RsaPrivateKey parse_private_key(std::string_view text) {
    const Fields f = parse_fields(text);
    RsaPrivateKey key;
    key.modulus = require(f, "n");
    const std::size_t width = key.modulus.bit_width();
    key.public_exponent = require(f, "e").resized(width);
    key.d = require(f, "d").resized(width);
    if (f.count("p") != f.count("q"))
        throw ParseError("key file: p and q must be given together");
    if (f.count("p")) {
        key.p = f.at("p");
        key.q = f.at("q");
    }
    key.validate();
    return key;
}

namespace {

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

RsaPublicKey read_public_key(const std::string &path) {
    return parse_public_key(read_text_file(path));
}

RsaPrivateKey read_private_key(const std::string &path) {
    return parse_private_key(read_text_file(path));
}

void write_text_file(const std::string &path, const std::string &contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out << contents;
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace montlab::rsa
