// Copyright 2026 The SCDA Simulator Authors
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

#ifndef SCDA_ERROR_HPP_
#define SCDA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace scda {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (dimension mismatch, out-of-order
// iteration index, non-neighbor target, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Graph construction or mutation failed (disconnected, malformed edge list).
class TopologyError : public Error {
 public:
  using Error::Error;
};

// The consensus iteration produced non-finite values or broke the state
// envelope.
class EngineError : public Error {
 public:
  using Error::Error;
};

// Configuration text could not be parsed or failed validation. The message
// always names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An attack was asked to run against a view that does not satisfy its
// observation preconditions.
class AttackRefused : public Error {
 public:
  using Error::Error;
};

namespace internal {

inline void Require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace internal
}  // namespace scda

#endif  // SCDA_ERROR_HPP_
