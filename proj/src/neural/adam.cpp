// Copyright 2026 The HamFlow Authors
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

#include "hamflow/neural/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "hamflow/errors.hpp"

namespace hamflow::neural {

AdamState AdamState::zeros(Eigen::Index n) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(n);
  s.v = Eigen::VectorXd::Zero(n);
  return s;
}

void to_json(nlohmann::json& j, const AdamState& s) {
  j = {{"step", s.step},
       {"beta1", s.beta1},
       {"beta2", s.beta2},
       {"eps", s.eps},
       {"m", std::vector<double>(s.m.data(), s.m.data() + s.m.size())},
       {"v", std::vector<double>(s.v.data(), s.v.data() + s.v.size())}};
}

void from_json(const nlohmann::json& j, AdamState& s) {
  j.at("step").get_to(s.step);
  j.at("beta1").get_to(s.beta1);
  j.at("beta2").get_to(s.beta2);
  j.at("eps").get_to(s.eps);
  const auto m = j.at("m").get<std::vector<double>>();
  const auto v = j.at("v").get<std::vector<double>>();
  if (m.size() != v.size()) throw std::invalid_argument("AdamState: moment size mismatch");
  s.m = Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
  s.v = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state, double lr) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  if (!grads.allFinite()) throw NumericalError("adam_step: non-finite gradient");
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseAbs2();
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

}  // namespace hamflow::neural
