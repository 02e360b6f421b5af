// Copyright 2026 The Sluice Authors. All Rights Reserved.
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

#include <ostream>

#include "model/model.hpp"

namespace sluice::model {

// layer,from_task,from_subspace,to_task,to_subspace,value
// Layers and subspaces are 1-based; tasks are named.
void write_alpha_csv(std::ostream& out, const SluiceModel& model);

// task,layer,value
void write_beta_csv(std::ostream& out, const SluiceModel& model);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace sluice::model
