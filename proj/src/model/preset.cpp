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

#include "model/preset.hpp"

#include <array>
#include <utility>

#include "errors.hpp"

namespace sluice::model {

namespace {

constexpr std::array<std::pair<Preset, std::string_view>, 7> kPresetNames{{
    {Preset::kLearnedSluice, "learned_sluice"},
    {Preset::kHardSharing, "hard_sharing"},
    {Preset::kLowSupervision, "low_supervision"},
    {Preset::kCrossStitch, "cross_stitch"},
    {Preset::kGroupLasso, "group_lasso"},
    {Preset::kFrustratinglyEasy, "frustratingly_easy_da"},
    {Preset::kSingleTask, "single_task"},
}};

std::uint32_t add_slot(AlphaPattern& p, double value, bool frozen) {
  p.slot_values.push_back(value);
  p.slot_frozen.push_back(frozen);
  return static_cast<std::uint32_t>(p.slot_values.size() - 1);
}

void require_fresh(const SluiceModel& model, std::string_view what) {
  if (model.trained()) {
    throw ContractError(std::string(what) +
                        " must be applied before any parameter update");
  }
}

void set_all_alpha(SluiceModel& model, const AlphaPattern& p) {
  for (std::size_t k = 1; k <= model.layers(); ++k) model.alpha(k).rewire(p);
}

}  // namespace

std::string_view preset_name(Preset p) {
  for (const auto& [preset, name] : kPresetNames) {
    if (preset == p) return name;
  }
  return "unknown";
}

std::optional<Preset> parse_preset(std::string_view name) {
  for (const auto& [preset, n] : kPresetNames) {
    if (n == name) return preset;
  }
  return std::nullopt;
}

const std::vector<Preset>& all_presets() {
  static const std::vector<Preset> presets = [] {
    std::vector<Preset> v;
    for (const auto& entry : kPresetNames) v.push_back(entry.first);
    return v;
  }();
  return presets;
}

std::string_view alpha_mode_name(AlphaMode m) {
  return m == AlphaMode::kLearned ? "learned" : "constant";
}

std::optional<AlphaMode> parse_alpha_mode(std::string_view name) {
  if (name == "learned") return AlphaMode::kLearned;
  if (name == "constant") return AlphaMode::kConstant;
  return std::nullopt;
}

std::string_view mixing_name(Mixing m) {
  switch (m) {
    case Mixing::kMixture: return "mixture";
    case Mixing::kSkip: return "skip";
    case Mixing::kConcat: return "concat";
  }
  return "unknown";
}

std::optional<Mixing> parse_mixing(std::string_view name) {
  if (name == "mixture") return Mixing::kMixture;
  if (name == "skip") return Mixing::kSkip;
  if (name == "concat") return Mixing::kConcat;
  return std::nullopt;
}

AlphaPattern constant_pattern(std::size_t n, double value) {
  AlphaPattern p;
  add_slot(p, value, true);
  p.entry_slot.assign(n * n, 0);
  return p;
}

AlphaPattern identity_pattern(std::size_t n) {
  AlphaPattern p;
  const std::uint32_t zero = add_slot(p, 0.0, true);
  const std::uint32_t one = add_slot(p, 1.0, true);
  p.entry_slot.assign(n * n, zero);
  for (std::size_t i = 0; i < n; ++i) p.entry_slot[i * n + i] = one;
  return p;
}

AlphaPattern layer_tied_pattern(std::size_t tasks, std::size_t subspaces) {
  const std::size_t n = tasks * subspaces;
  AlphaPattern p;
  const double diag = tasks > 1 ? 0.9 : 1.0;
  const double off = tasks > 1 ? 0.1 / static_cast<double>(tasks - 1) : 0.0;
  for (std::size_t a = 0; a < tasks; ++a) {
    for (std::size_t b = 0; b < tasks; ++b) add_slot(p, a == b ? diag : off, false);
  }
  const std::uint32_t zero = add_slot(p, 0.0, true);
  p.entry_slot.assign(n * n, zero);
  for (std::size_t a = 0; a < tasks; ++a) {
    for (std::size_t b = 0; b < tasks; ++b) {
      for (std::size_t s = 0; s < subspaces; ++s) {
        p.entry_slot[(a * subspaces + s) * n + (b * subspaces + s)] =
            static_cast<std::uint32_t>(a * tasks + b);
      }
    }
  }
  return p;
}

AlphaPattern group_lasso_pattern(std::size_t tasks, std::size_t subspaces) {
  const std::size_t n = tasks * subspaces;
  AlphaPattern p = AlphaUnit::learned_pattern(n);
  const std::uint32_t zero = add_slot(p, 0.0, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i / subspaces != j / subspaces) p.entry_slot[i * n + j] = zero;
    }
  }
  return compact(std::move(p));
}

AlphaPattern shared_private_pattern(std::size_t tasks, std::size_t subspaces) {
  if (subspaces < 2) {
    throw ConfigError("a shared/private split needs at least 2 subspaces");
  }
  const std::size_t n = tasks * subspaces;
  constexpr std::size_t kShared = 1;
  AlphaPattern p = AlphaUnit::learned_pattern(n);
  const std::uint32_t zero = add_slot(p, 0.0, true);
  const auto learned = p.entry_slot;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t a = i / subspaces;
      const std::size_t b = j / subspaces;
      if (a == b) continue;
      if (i % subspaces == kShared && j % subspaces == kShared) {
        p.entry_slot[i * n + j] = learned[j * n + j];
      } else {
        p.entry_slot[i * n + j] = zero;
      }
    }
  }
  return compact(std::move(p));
}

AlphaPattern compact(AlphaPattern pattern) {
  std::vector<std::int64_t> remap(pattern.slot_values.size(), -1);
  AlphaPattern out;
  out.entry_slot.reserve(pattern.entry_slot.size());
  for (std::uint32_t s : pattern.entry_slot) {
    if (remap[s] < 0) {
      remap[s] = add_slot(out, pattern.slot_values[s], pattern.slot_frozen[s]);
    }
    out.entry_slot.push_back(static_cast<std::uint32_t>(remap[s]));
  }
  return out;
}

void apply_preset(SluiceModel& model, Preset preset) {
  require_fresh(model, "a preset");
  const std::size_t m_count = model.tasks();
  const std::size_t k_count = model.layers();
  const std::size_t s_count = model.subspaces();
  const std::size_t n = m_count * s_count;
  const auto learned_beta = BetaMixer::default_weights(k_count);
  const auto outer_beta = BetaMixer::one_hot(k_count, k_count);

  switch (preset) {
    case Preset::kLearnedSluice:
      set_all_alpha(model, AlphaUnit::learned_pattern(n));
      for (std::size_t m = 0; m < m_count; ++m) model.beta(m).assign(learned_beta, false);
      break;
    case Preset::kHardSharing:
      set_all_alpha(model, constant_pattern(n, 1.0 / static_cast<double>(n)));
      for (std::size_t m = 0; m < m_count; ++m) model.beta(m).assign(outer_beta, true);
      model.set_gamma(0.0);
      break;
    case Preset::kLowSupervision:
      model.alpha(1).rewire(constant_pattern(n, 1.0 / static_cast<double>(n)));
      for (std::size_t k = 2; k <= k_count; ++k) model.alpha(k).rewire(identity_pattern(n));
      for (std::size_t m = 0; m < m_count; ++m) {
        model.beta(m).assign(m == model.main_task()
                                 ? outer_beta
                                 : BetaMixer::one_hot(k_count, 1),
                             true);
      }
      model.set_gamma(0.0);
      break;
    case Preset::kCrossStitch:
      set_all_alpha(model, layer_tied_pattern(m_count, s_count));
      for (std::size_t m = 0; m < m_count; ++m) model.beta(m).assign(outer_beta, true);
      model.set_gamma(0.0);
      break;
    case Preset::kGroupLasso:
      set_all_alpha(model, group_lasso_pattern(m_count, s_count));
      for (std::size_t m = 0; m < m_count; ++m) model.beta(m).assign(learned_beta, false);
      break;
    case Preset::kFrustratinglyEasy:
      set_all_alpha(model, shared_private_pattern(m_count, s_count));
      for (std::size_t m = 0; m < m_count; ++m) model.beta(m).assign(learned_beta, false);
      break;
    case Preset::kSingleTask:
      set_all_alpha(model, identity_pattern(n));
      for (std::size_t m = 0; m < m_count; ++m) model.beta(m).assign(outer_beta, true);
      model.set_gamma(0.0);
      break;
  }
  model.set_preset_tag(preset);
  model.set_ablation_tag(Ablation{});
}

void apply_ablation(SluiceModel& model, const Ablation& ablation) {
  require_fresh(model, "an ablation");
  const bool concat = ablation.mixing == Mixing::kConcat;
  if (concat != model.config().concat_head) {
    throw ConfigError(concat ? "concat mixing needs a model built with concat heads"
                             : "a model built with concat heads needs concat mixing");
  }
  const std::size_t m_count = model.tasks();
  const std::size_t k_count = model.layers();
  const std::size_t n = m_count * model.subspaces();
  if (ablation.alpha == AlphaMode::kConstant) {
    set_all_alpha(model, constant_pattern(n, 1.0 / static_cast<double>(n)));
  } else if (!ablation.subspaces) {
    set_all_alpha(model, layer_tied_pattern(m_count, model.subspaces()));
  }
  if (!ablation.subspaces) model.set_gamma(0.0);
  for (std::size_t m = 0; m < m_count; ++m) {
    BetaMixer& beta = model.beta(m);
    if (ablation.mixing == Mixing::kSkip) {
      beta.assign(std::vector<double>(k_count, 1.0), true);
    } else if (concat) {
      std::vector<double> w(beta.weights().value().values().begin(),
                            beta.weights().value().values().end());
      beta.assign(std::move(w), true);
    }
  }
  model.set_ablation_tag(ablation);
}

std::vector<Ablation> ablation_grid() {
  std::vector<Ablation> grid;
  for (AlphaMode a : {AlphaMode::kConstant, AlphaMode::kLearned}) {
    for (Mixing x : {Mixing::kConcat, Mixing::kSkip, Mixing::kMixture}) {
      grid.push_back({a, false, x});
    }
  }
  grid.push_back({AlphaMode::kLearned, true, Mixing::kMixture});
  return grid;
}

}  // namespace sluice::model
