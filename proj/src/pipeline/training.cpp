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

#include "hamflow/pipeline/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

namespace hamflow::pipeline {

using nlohmann::json;
using neural::Direction;
using neural::SequenceModel;

namespace {

constexpr Eigen::Index kGradChunk = 16;

int rows_within(const TrajectoryRecord& r, double window) {
  int n = 0;
  for (double t : r.observables.times) {
    if (t <= window * (1.0 + 1e-12)) ++n;
  }
  return n;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void to_json(json& j, const EpochStats& s) {
  j = {{"epoch", s.epoch},
       {"train_loss", s.train_loss},
       {"validation_loss", s.validation_loss},
       {"learning_rate", s.learning_rate}};
}

void from_json(const json& j, EpochStats& s) {
  j.at("epoch").get_to(s.epoch);
  j.at("train_loss").get_to(s.train_loss);
  j.at("validation_loss").get_to(s.validation_loss);
  j.at("learning_rate").get_to(s.learning_rate);
}

Eigen::MatrixXd hamiltonian_inputs(const Eigen::MatrixXd& observables, const Eigen::VectorXd& scaled_times) {
  const Eigen::Index steps = observables.rows();
  Eigen::MatrixXd in(steps, observables.cols() + 1);
  for (Eigen::Index k = 0; k < steps; ++k) {
    in.row(k).head(observables.cols()) = observables.row(std::min(k + 1, steps - 1));
    in(k, observables.cols()) = scaled_times[k];
  }
  return in;
}

Example make_example(const neural::ModelConfig& m, InitialStates mode, const TrajectoryRecord& r) {
  const auto& obs = r.observables;
  const auto steps = static_cast<Eigen::Index>(obs.times.size());
  const auto n_fields = static_cast<Eigen::Index>(r.fields.size());
  Eigen::MatrixXd f(steps, n_fields);
  for (Eigen::Index j = 0; j < n_fields; ++j) {
    const auto& v = r.fields[static_cast<std::size_t>(j)].values();
    if (static_cast<Eigen::Index>(v.size()) != steps) throw std::invalid_argument("record field and observable grids differ");
    for (Eigen::Index k = 0; k < steps; ++k) f(k, j) = v[static_cast<std::size_t>(k)] / m.field_scale;
  }
  Eigen::VectorXd t(steps);
  for (Eigen::Index k = 0; k < steps; ++k) t[k] = obs.times[static_cast<std::size_t>(k)] / m.time_scale;
  Example e;
  e.o0 = encoder_input(r.initial_state, mode);
  if (e.o0.size() != m.o0_width) throw std::invalid_argument("record initial state does not match the encoder width");
  if (m.direction == Direction::Dynamics) {
    e.inputs.resize(steps, n_fields + 1);
    e.inputs << f, t;
    e.targets = obs.values;
  } else {
    e.inputs = hamiltonian_inputs(obs.values, t);
    e.targets = f;
  }
  if (e.inputs.cols() != m.input_width || e.targets.cols() != m.output_width) {
    throw std::invalid_argument("record widths do not match the model");
  }
  return e;
}

Batch make_batch(std::span<const Example* const> ex, int rows) {
  Batch b;
  if (ex.empty()) return b;
  const Eigen::Index steps = rows < 0 ? ex.front()->inputs.rows() : rows;
  const auto n = static_cast<Eigen::Index>(ex.size());
  b.o0.resize(ex.front()->o0.size(), n);
  b.inputs.assign(static_cast<std::size_t>(steps), Eigen::MatrixXd(ex.front()->inputs.cols(), n));
  b.targets.assign(static_cast<std::size_t>(steps), Eigen::MatrixXd(ex.front()->targets.cols(), n));
  for (Eigen::Index s = 0; s < n; ++s) {
    const Example& e = *ex[static_cast<std::size_t>(s)];
    if (e.inputs.rows() < steps) throw std::invalid_argument("make_batch: sequence too short");
    b.o0.col(s) = e.o0;
    for (Eigen::Index k = 0; k < steps; ++k) {
      b.inputs[static_cast<std::size_t>(k)].col(s) = e.inputs.row(k).transpose();
      b.targets[static_cast<std::size_t>(k)].col(s) = e.targets.row(k).transpose();
    }
  }
  return b;
}

double batch_gradient(const SequenceModel& model, const Batch& batch, int jobs, Eigen::VectorXd& grad) {
  const Eigen::Index n = batch.o0.cols();
  const std::size_t steps = batch.inputs.size();
  const double count = static_cast<double>(n) * static_cast<double>(steps) *
                       static_cast<double>(model.config().output_width);
  // Chunking depends on the batch only, so any thread count gives the same sums.
  const int chunks = static_cast<int>(std::max<Eigen::Index>(1, (n + kGradChunk - 1) / kGradChunk));
  std::vector<Eigen::VectorXd> grads(static_cast<std::size_t>(chunks));
  std::vector<double> sq(static_cast<std::size_t>(chunks), 0.0);
  parallel_for(chunks, jobs, [&](int c) {
    const Eigen::Index lo = std::min<Eigen::Index>(n, c * kGradChunk);
    const Eigen::Index hi = std::min<Eigen::Index>(n, lo + kGradChunk);
    neural::Sequence in(steps), tg(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      in[k] = batch.inputs[k].middleCols(lo, hi - lo);
      tg[k] = batch.targets[k].middleCols(lo, hi - lo);
    }
    const auto cache = neural::forward(model, in, batch.o0.middleCols(lo, hi - lo));
    neural::Sequence dy(steps);
    double s = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      dy[k] = cache.outputs[k] - tg[k];
      s += dy[k].squaredNorm();
      dy[k] *= 2.0 / count;
    }
    sq[static_cast<std::size_t>(c)] = s;
    grads[static_cast<std::size_t>(c)] = neural::backward(model, cache, dy);
  });
  grad = grads[0];
  double total = sq[0];
  for (std::size_t c = 1; c < grads.size(); ++c) {
    grad += grads[c];
    total += sq[c];
  }
  return total / count;
}

double batch_loss(const SequenceModel& model, std::span<const Example* const> ex, int rows, int chunk) {
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t lo = 0; lo < ex.size(); lo += static_cast<std::size_t>(chunk)) {
    const auto part = ex.subspan(lo, std::min<std::size_t>(static_cast<std::size_t>(chunk), ex.size() - lo));
    const Batch b = make_batch(part, rows);
    const auto out = neural::forward(model, b.inputs, b.o0).outputs;
    for (std::size_t k = 0; k < out.size(); ++k) {
      sum += (out[k] - b.targets[k]).squaredNorm();
      count += static_cast<double>(out[k].size());
    }
  }
  return count > 0 ? sum / count : 0.0;
}

std::string training_hash(const std::string& manifest_hash, const neural::ModelConfig& model,
                          const TrainingConfig& training) {
  json t = training;
  t.erase("jobs");
  return sha256_hex(json{{"manifest", manifest_hash}, {"model", model}, {"training", t}}.dump());
}

TrainResult train(const Dataset& data, const TrainOptions& opt) {
  const auto& system = data.manifest.config.system;
  const auto cfg = model_config_for(system, opt.shape, opt.direction);
  const auto& tc = opt.training;
  const double window = tc.validation_window > 0 ? tc.validation_window : data.manifest.config.horizon;

  std::vector<Example> train_ex, val_ex;
  for (const auto* r : data.split("train")) train_ex.push_back(make_example(cfg, system.initial_states, *r));
  for (const auto* r : data.split("validation")) val_ex.push_back(make_example(cfg, system.initial_states, *r));
  if (train_ex.empty()) throw std::invalid_argument("train: the dataset has no training records");
  const int train_rows = static_cast<int>(train_ex.front().inputs.rows());
  int val_rows = -1;
  if (!val_ex.empty()) val_rows = rows_within(*data.split("validation").front(), window);
  std::vector<const Example*> val_ptr;
  for (const auto& e : val_ex) val_ptr.push_back(&e);

  TrainResult result;
  result.manifest_hash = data.manifest.content_hash;
  SequenceModel model = SequenceModel::initialized(cfg, tc.seed);
  model.config_hash = training_hash(result.manifest_hash, cfg, tc);
  auto adam = neural::AdamState::zeros(model.layout().size);
  Eigen::VectorXd best = model.params();
  double best_loss = INFINITY;
  int start_epoch = 0;

  const auto state_path = opt.state_dir.empty() ? std::filesystem::path{} : opt.state_dir / "train_state.json";
  if (opt.resume && !state_path.empty() && std::filesystem::exists(state_path)) {
    std::ifstream f(state_path);
    const json s = json::parse(f);
    if (s.at("config_hash").get<std::string>() != model.config_hash) {
      throw std::invalid_argument("resume: saved training state belongs to a different run");
    }
    model.params() = vector_from(s.at("params"));
    best = vector_from(s.at("best_params"));
    adam = s.at("adam").get<neural::AdamState>();
    best_loss = s.at("best_loss").get<double>();
    result.best_epoch = s.at("best_epoch").get<int>();
    result.history = s.at("history").get<std::vector<EpochStats>>();
    start_epoch = s.at("next_epoch").get<int>();
  }

  std::vector<int> order(train_ex.size());
  Eigen::VectorXd grad;
  for (int epoch = start_epoch; epoch < tc.epochs; ++epoch) {
    const double frac = tc.epochs > 1 ? static_cast<double>(epoch) / (tc.epochs - 1) : 0.0;
    const double lr = tc.learning_rate * (1.0 + (tc.final_lr_fraction - 1.0) * frac);
    std::iota(order.begin(), order.end(), 0);
    auto rng = fields::make_rng(tc.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t lo = 0; lo < order.size(); lo += static_cast<std::size_t>(tc.batch_size)) {
      const std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(tc.batch_size));
      std::vector<const Example*> part;
      for (std::size_t k = lo; k < hi; ++k) part.push_back(&train_ex[static_cast<std::size_t>(order[k])]);
      const Batch b = make_batch(part, train_rows);
      const double loss = batch_gradient(model, b, tc.jobs, grad);
      if (!std::isfinite(loss)) throw NumericalError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
      loss_sum += loss * static_cast<double>(hi - lo);
      neural::adam_step(model.params(), grad, adam, lr);
    }
    EpochStats st;
    st.epoch = epoch;
    st.learning_rate = lr;
    st.train_loss = loss_sum / static_cast<double>(order.size());
    st.validation_loss = val_ptr.empty() ? st.train_loss : batch_loss(model, val_ptr, val_rows);
    if (!std::isfinite(st.validation_loss)) throw NumericalError("training diverged: non-finite validation loss");
    if (st.validation_loss < best_loss) {
      best_loss = st.validation_loss;
      best = model.params();
      result.best_epoch = epoch;
    }
    result.history.push_back(st);
    if (opt.on_epoch) opt.on_epoch(st);
    if (!state_path.empty()) {
      std::filesystem::create_directories(opt.state_dir);
      const json s = {{"config_hash", model.config_hash},
                      {"next_epoch", epoch + 1},
                      {"params", vector_json(model.params())},
                      {"best_params", vector_json(best)},
                      {"best_loss", best_loss},
                      {"best_epoch", result.best_epoch},
                      {"adam", adam},
                      {"history", result.history}};
      const auto tmp = state_path.string() + ".tmp";
      {
        std::ofstream f(tmp);
        f << s.dump();
      }
      std::filesystem::rename(tmp, state_path);
    }
  }
  model.params() = best;
  result.model = std::move(model);
  return result;
}

}  // namespace hamflow::pipeline
