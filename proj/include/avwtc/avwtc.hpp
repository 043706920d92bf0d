// Copyright 2026 The avwtc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Umbrella header for the whole library.

#include "avwtc/capacity.hpp"
#include "avwtc/coupling.hpp"
#include "avwtc/errors.hpp"
#include "avwtc/info.hpp"
#include "avwtc/prob.hpp"
#include "avwtc/rng.hpp"
#include "avwtc/sim.hpp"
#include "avwtc/simplex_opt.hpp"
#include "avwtc/soft_covering.hpp"
