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

#include "hamflow/neural/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hamflow::neural {

GradientCheckReport gradient_check(const SequenceModel& model, const Sequence& inputs,
                                   const MatrixXd& o0, const Sequence& targets, int probes,
                                   double step, std::uint64_t seed) {
  const auto cache = forward(model, inputs, o0);
  const VectorXd analytic = backward(model, cache, mse_gradient(cache.outputs, targets));

  std::vector<std::pair<Eigen::Index, Eigen::Index>> ranges;
  const auto& lay = model.layout();
  auto add = [&](const DenseBlock& b) { ranges.emplace_back(b.w_offset, b.b_offset + b.rows); };
  add(lay.head);
  for (const auto& b : lay.lstm) add(b);
  for (const auto& b : lay.encoder_h) add(b);
  for (const auto& b : lay.encoder_c) add(b);

  std::seed_seq seq{static_cast<std::uint32_t>(seed), 0x67636bu};
  std::mt19937_64 rng(seq);
  SequenceModel probe = model;
  GradientCheckReport r;
  r.min_gradient = INFINITY;
  for (int k = 0; k < probes; ++k) {
    const auto& [lo, hi] = ranges[static_cast<std::size_t>(k) % ranges.size()];
    std::uniform_int_distribution<Eigen::Index> pick(lo, hi - 1);
    const Eigen::Index idx = pick(rng);
    const double saved = probe.params()[idx];
    probe.params()[idx] = saved + step;
    const Sequence up = forward(probe, inputs, o0).outputs;
    probe.params()[idx] = saved - step;
    const Sequence down = forward(probe, inputs, o0).outputs;
    probe.params()[idx] = saved;
    // L(+) - L(-) factored as sum (y+ - y-)(y+ + y- - 2 T) / M to avoid cancellation.
    double diff = 0.0;
    double count = 0.0;
    for (std::size_t t = 0; t < up.size(); ++t) {
      diff += ((up[t] - down[t]).array() * (up[t] + down[t] - 2.0 * targets[t]).array()).sum();
      count += static_cast<double>(up[t].size());
    }
    const double numeric = diff / count / (2.0 * step);
    const double a = analytic[idx];
    const double err = std::abs(a - numeric);
    const double scale = std::max(std::abs(a), std::abs(numeric));
    r.max_absolute_error = std::max(r.max_absolute_error, err);
    r.max_relative_error = std::max(r.max_relative_error, scale > 0 ? err / scale : 0.0);
    r.min_gradient = std::min(r.min_gradient, std::abs(a));
    ++r.probes;
  }
  return r;
}

}  // namespace hamflow::neural
