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

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "model/model.hpp"
#include "model/sharing.hpp"

namespace sluice::model {

std::string_view preset_name(Preset p);
std::optional<Preset> parse_preset(std::string_view name);
const std::vector<Preset>& all_presets();

std::string_view alpha_mode_name(AlphaMode m);
std::optional<AlphaMode> parse_alpha_mode(std::string_view name);
std::string_view mixing_name(Mixing m);
std::optional<Mixing> parse_mixing(std::string_view name);

// Alpha layouts used by the presets. n = M * S.
AlphaPattern constant_pattern(std::size_t n, double value);
AlphaPattern identity_pattern(std::size_t n);
// Subspace-tied task-level mixing: entry (a, s) <- (b, t) reads the task
// pair's slot when s == t and a frozen zero otherwise.
AlphaPattern layer_tied_pattern(std::size_t tasks, std::size_t subspaces);
// Learned within-task blocks, frozen zero cross-task blocks.
AlphaPattern group_lasso_pattern(std::size_t tasks, std::size_t subspaces);
// Subspace 1 private, subspace 2 shared: cross-task entries touching a
// private subspace are frozen zeros; (a, 2) <- (b, 2) is tied to
// (b, 2) <- (b, 2).
AlphaPattern shared_private_pattern(std::size_t tasks, std::size_t subspaces);

// Drops slots no entry references.
AlphaPattern compact(AlphaPattern pattern);

// Rewires alpha and beta (and gamma for the presets that ignore subspaces).
// Throws ContractError once the model has been updated.
void apply_preset(SluiceModel& model, Preset preset);

// Applied after a preset. Default flags leave the preset untouched.
void apply_ablation(SluiceModel& model, const Ablation& ablation);

// The seven ablation rows: constant alpha x {concat, skip, mixture}, learned
// alpha x {concat, skip, mixture}, learned alpha with mixture and subspaces.
std::vector<Ablation> ablation_grid();

}  // namespace sluice::model
