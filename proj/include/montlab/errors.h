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

#include <stdexcept>
#include <string>

namespace montlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the operation's domain (operand >= modulus,
/// even modulus, zero divisor, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Malformed textual input: hex strings, key files, trace files, configs.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// The hardware simulator was driven out of sequence.
class ProtocolError : public Error {
  public:
    using Error::Error;
};

/// An internal arithmetic invariant did not hold. Indicates a bug.
class InvariantError : public Error {
  public:
    using Error::Error;
};

/// Prime search gave up; retrying with another seed may succeed.
class KeygenError : public Error {
  public:
    using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
  public:
    using Error::Error;
};

/// Pearson correlation is undefined for a constant sequence.
class UndefinedCorrelation : public Error {
  public:
    using Error::Error;
};

} // namespace montlab
