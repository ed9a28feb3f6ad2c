// Copyright 2026 The dialign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace dialign {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// exit codes: validation-type errors exit 2, everything else 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ill-formed configuration (empty ground truth, zero horizon, bad weights).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Profiles from different slot namespaces, or unknown slot on a closed schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Caller passed an out-of-range argument.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed record (action, trajectory, log line).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Environment driven out of order, e.g. step after the episode finished.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value in a numerical routine.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dialign
