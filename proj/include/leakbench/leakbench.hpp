// Copyright 2026 The leakbench Authors
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

#ifndef LEAKBENCH_LEAKBENCH_HPP_
#define LEAKBENCH_LEAKBENCH_HPP_

#include "leakbench/channel.hpp"
#include "leakbench/fit.hpp"
#include "leakbench/gates.hpp"
#include "leakbench/linalg.hpp"
#include "leakbench/noise.hpp"
#include "leakbench/pauli.hpp"
#include "leakbench/protocol.hpp"
#include "leakbench/qspace.hpp"
#include "leakbench/rng.hpp"
#include "leakbench/spam.hpp"
#include "leakbench/theory.hpp"

#endif  // LEAKBENCH_LEAKBENCH_HPP_
