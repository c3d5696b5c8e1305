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

#ifndef SCDA_TOLERANCES_HPP_
#define SCDA_TOLERANCES_HPP_

namespace scda {

// Every floating-point tolerance used by runtime checks lives here.
struct Tolerances {
  // Row/column sums of the weight matrix.
  static constexpr double kStochastic = 1e-12;
  // Per-entry, per-round slack for sum preservation: n * k * kMassPerOp.
  static constexpr double kMassPerOp = 1e-12;
  // Relative slack on the state envelope M and the decay envelope.
  static constexpr double kEnvelopeRelative = 1e-12;
  // Disconnected random draws are retried this many times.
  static constexpr int kGeneratorRetries = 100;
};

}  // namespace scda

#endif  // SCDA_TOLERANCES_HPP_
