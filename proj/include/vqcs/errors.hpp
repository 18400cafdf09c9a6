// Copyright 2026 The vqcs Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace vqcs {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// Requested size is out of range or cannot be allocated.
class SizeError : public Error {
  public:
    using Error::Error;
};

/// Dimensions of an input do not match what the operation requires.
class ShapeError : public Error {
  public:
    using Error::Error;
};

/// Input violates a mathematical validity requirement (unitarity,
/// completeness, unit trace, ...).
class ValidityError : public Error {
  public:
    using Error::Error;
};

/// A scalar argument lies outside its admissible domain.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A qubit index does not fit the state it is applied to.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Operation applied to the wrong kind of state (e.g. a channel to a
/// pure state).
class TypeError : public Error {
  public:
    using Error::Error;
};

/// Operation is not supported for this input (e.g. derivative of a
/// generic gate).
class UnsupportedError : public Error {
  public:
    using Error::Error;
};

/// The state is degenerate for the requested operation (zero vector,
/// vanishing measurement probabilities).
class DegenerateStateError : public Error {
  public:
    using Error::Error;
};

/// A channel superoperator cannot be inverted during a noisy gradient.
class NonInvertibleChannelError : public Error {
  public:
    using Error::Error;
};

/// File or stream I/O failed.
class IoError : public Error {
  public:
    using Error::Error;
};

/// Invalid command-line or report usage.
class UsageError : public Error {
  public:
    using Error::Error;
};

} // namespace vqcs
