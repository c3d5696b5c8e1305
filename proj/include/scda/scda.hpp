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

#ifndef SCDA_SCDA_HPP_
#define SCDA_SCDA_HPP_

// Umbrella header for the simulation library (CLI excluded).

#include "scda/config.hpp"
#include "scda/engine.hpp"
#include "scda/error.hpp"
#include "scda/experiment.hpp"
#include "scda/noise.hpp"
#include "scda/privacy.hpp"
#include "scda/topology.hpp"
#include "scda/weights.hpp"

#endif  // SCDA_SCDA_HPP_
