// Copyright 2026 The hublocate Authors
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

#include "hublocate/cost_model.hpp"
#include "hublocate/errors.hpp"
#include "hublocate/exact_oracle.hpp"
#include "hublocate/gen.hpp"
#include "hublocate/grid.hpp"
#include "hublocate/heuristics.hpp"
#include "hublocate/instance_io.hpp"
#include "hublocate/milp.hpp"
#include "hublocate/milp_io.hpp"
#include "hublocate/network_model.hpp"
#include "hublocate/parallel.hpp"
#include "hublocate/solution.hpp"
#include "hublocate/solution_io.hpp"
