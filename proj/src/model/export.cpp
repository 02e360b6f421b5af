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

#include "model/export.hpp"

#include <charconv>
#include <string>

namespace sluice::model {

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

void write_alpha_csv(std::ostream& out, const SluiceModel& model) {
  out << "layer,from_task,from_subspace,to_task,to_subspace,value\n";
  for (std::size_t k = 1; k <= model.layers(); ++k) {
    const AlphaUnit& unit = model.alpha(k);
    for (std::size_t to = 0; to < unit.dim(); ++to) {
      for (std::size_t from = 0; from < unit.dim(); ++from) {
        out << k << ',' << model.task_name(from / unit.subspaces()) << ','
            << from % unit.subspaces() + 1 << ','
            << model.task_name(to / unit.subspaces()) << ','
            << to % unit.subspaces() + 1 << ','
            << format_double(unit.entry(to, from)) << '\n';
      }
    }
  }
}

void write_beta_csv(std::ostream& out, const SluiceModel& model) {
  out << "task,layer,value\n";
  for (std::size_t m = 0; m < model.tasks(); ++m) {
    const BetaMixer& beta = model.beta(m);
    for (std::size_t k = 0; k < beta.layers(); ++k) {
      out << model.task_name(m) << ',' << k + 1 << ','
          << format_double(beta.weight(k)) << '\n';
    }
  }
}

}  // namespace sluice::model
