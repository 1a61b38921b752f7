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

#include "hamflow/pipeline/inference.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hamflow/dynamics/evolve.hpp"
#include "hamflow/dynamics/expansion.hpp"
#include "hamflow/pipeline/training.hpp"

namespace hamflow::pipeline {

using neural::Direction;
using neural::SequenceModel;
using nlohmann::json;

namespace {

void require_direction(const SequenceModel& m, Direction d, const char* what) {
  if (m.config().direction != d) {
    throw std::invalid_argument(std::string(what) + ": model direction is " + neural::to_string(m.config().direction));
  }
}

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

fields::UniformGrid grid_from_times(const std::vector<double>& times) {
  if (times.size() < 2) throw std::invalid_argument("grid_from_times: need at least two samples");
  const double dt = times[1] - times[0];
  if (!(dt > 0)) throw std::invalid_argument("grid_from_times: times must increase");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - (times[0] + static_cast<double>(k) * dt)) > 1e-9 * dt * static_cast<double>(k + 1)) {
      throw std::invalid_argument("grid_from_times: times are not uniformly spaced");
    }
  }
  return fields::UniformGrid{times[0], dt, static_cast<int>(times.size()) - 1};
}

fields::UniformGrid nmr_protocol_grid() { return fields::UniformGrid{0.0, 200e-6, 249}; }

dynamics::ObservableSeries predict_dynamics(const SequenceModel& model,
                                            const std::vector<fields::DrivingField>& flds,
                                            const Eigen::VectorXd& o0,
                                            const dynamics::ObservableSet& observables,
                                            Eigen::MatrixXd* raw) {
  require_direction(model, Direction::Dynamics, "predict_dynamics");
  const auto& cfg = model.config();
  if (static_cast<int>(flds.size()) + 1 != cfg.input_width) {
    throw std::invalid_argument("predict_dynamics: field count does not match the model");
  }
  if (static_cast<int>(observables.size()) != cfg.output_width) {
    throw std::invalid_argument("predict_dynamics: observable set does not match the model");
  }
  const auto& grid = flds.front().grid();
  for (const auto& f : flds) {
    if (!(f.grid() == grid)) throw std::invalid_argument("predict_dynamics: field grids differ");
  }
  const int steps = grid.n_points();
  Eigen::MatrixXd in(steps, cfg.input_width);
  for (int k = 0; k < steps; ++k) {
    for (std::size_t j = 0; j < flds.size(); ++j) {
      in(k, static_cast<Eigen::Index>(j)) = flds[j].values()[static_cast<std::size_t>(k)] / cfg.field_scale;
    }
    in(k, cfg.input_width - 1) = grid.time(k) / cfg.time_scale;
  }
  const Eigen::MatrixXd out = neural::model_forward(model, in, o0);
  if (raw) *raw = out;
  dynamics::ObservableSeries s;
  s.times = grid.times();
  s.values = out.cwiseMax(-1.0).cwiseMin(1.0);
  s.observables = observables;
  return s;
}

std::vector<fields::DrivingField> infer_field(const SequenceModel& model,
                                              const dynamics::ObservableSeries& obs,
                                              const Eigen::VectorXd& o0) {
  require_direction(model, Direction::Hamiltonian, "infer_field");
  const auto& cfg = model.config();
  if (obs.values.cols() + 1 != cfg.input_width) {
    throw std::invalid_argument("infer_field: observable count does not match the model");
  }
  const auto grid = grid_from_times(obs.times);
  const Eigen::VectorXd t =
      Eigen::Map<const Eigen::VectorXd>(obs.times.data(), static_cast<Eigen::Index>(obs.times.size())) / cfg.time_scale;
  const Eigen::MatrixXd in = hamiltonian_inputs(obs.values, t);
  const Eigen::MatrixXd out = neural::model_forward(model, in, o0) * cfg.field_scale;
  std::vector<fields::DrivingField> result;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    fields::FieldMeta meta;
    meta.kind = "inferred";
    std::vector<double> v(out.rows());
    for (Eigen::Index k = 0; k < out.rows(); ++k) v[static_cast<std::size_t>(k)] = out(k, j);
    result.emplace_back(grid, std::move(v), meta, fields::Interpolation::Linear);
  }
  return result;
}

DetuningInference infer_detuning(const SequenceModel& model, const SystemConfig& system,
                                 const dynamics::ObservableSeries& observed,
                                 const std::vector<dynamics::BlochVector>& initial_state) {
  if (system.kind != dynamics::HamiltonianKind::ScSwapDetuned) {
    throw std::invalid_argument("infer_detuning: superconducting system required");
  }
  if (observed.observables.names() != system.observable_set().names()) {
    throw std::invalid_argument("infer_detuning: observables differ from the trained set");
  }
  auto flds = infer_field(model, observed, encoder_input(initial_state, system.initial_states));
  if (flds.size() != 2) throw std::invalid_argument("infer_detuning: model does not output two detunings");
  DetuningInference r;
  r.delta1 = flds[0];
  r.delta2 = flds[1];
  r.resimulated = simulate(system, flds, initial_state);
  r.closed_loop_mse = (r.resimulated.values - observed.values).squaredNorm() /
                      static_cast<double>(observed.values.size());
  return r;
}

json EvalReport::to_json() const {
  std::vector<double> mean_row(static_cast<std::size_t>(mse_vs_time.rows()));
  for (Eigen::Index k = 0; k < mse_vs_time.rows(); ++k) {
    mean_row[static_cast<std::size_t>(k)] = mse_vs_time.cols() ? mse_vs_time.row(k).mean() : 0.0;
  }
  json per_column = json::object();
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto col = mse_vs_time.col(static_cast<Eigen::Index>(c));
    per_column[columns[c]] = std::vector<double>(col.data(), col.data() + col.size());
  }
  return {{"direction", neural::to_string(direction)},
          {"instances", instances},
          {"split_time", split_time},
          {"rescale", rescale},
          {"train_window_mse", nullable(train_window_mse)},
          {"extrapolation_mse", nullable(extrapolation_mse)},
          {"columns", columns},
          {"times", times},
          {"mse_vs_time_mean", mean_row},
          {"mse_vs_time", per_column},
          {"instance_train_mse", instance_train_mse},
          {"instance_extrapolation_mse", instance_extrapolation_mse}};
}

void EvalReport::write_json(const std::filesystem::path& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << to_json().dump(2) << '\n';
}

void EvalReport::write_csv(const std::filesystem::path& path) const {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  std::fprintf(f, "t");
  for (const auto& c : columns) std::fprintf(f, ",%s", c.c_str());
  std::fprintf(f, ",mean\n");
  for (Eigen::Index k = 0; k < mse_vs_time.rows(); ++k) {
    std::fprintf(f, "%.17g", times[static_cast<std::size_t>(k)]);
    for (Eigen::Index c = 0; c < mse_vs_time.cols(); ++c) std::fprintf(f, ",%.17g", mse_vs_time(k, c));
    std::fprintf(f, ",%.17g\n", mse_vs_time.cols() ? mse_vs_time.row(k).mean() : 0.0);
  }
  std::fclose(f);
}

EvalReport evaluate(const SequenceModel& model, std::span<const TrajectoryRecord* const> records,
                    InitialStates mode, double split_time, int jobs) {
  const auto& cfg = model.config();
  EvalReport rep;
  rep.direction = cfg.direction;
  rep.split_time = split_time;
  rep.rescale = cfg.direction == Direction::Dynamics ? 1.0 : cfg.field_scale;
  rep.instances = static_cast<int>(records.size());
  if (records.empty()) return rep;

  const auto& first = *records.front();
  rep.times = first.observables.times;
  if (cfg.direction == Direction::Dynamics) {
    rep.columns = first.observables.observables.names();
  } else {
    rep.columns = first.fields.size() == 2 ? std::vector<std::string>{"Delta1", "Delta2"}
                                           : std::vector<std::string>{"B"};
  }
  const auto steps = static_cast<Eigen::Index>(rep.times.size());
  std::vector<bool> in_train(rep.times.size());
  Eigen::Index n_train_rows = 0;
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    in_train[k] = rep.times[k] <= split_time * (1.0 + 1e-12);
    n_train_rows += in_train[k] ? 1 : 0;
  }
  const Eigen::Index n_extra_rows = steps - n_train_rows;

  // Squared errors per instance, rows = times.
  std::vector<Eigen::MatrixXd> sq(records.size());
  constexpr int kChunk = 25;
  const int n_chunks = static_cast<int>((records.size() + kChunk - 1) / kChunk);
  parallel_for(n_chunks, jobs, [&](int c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(records.size(), lo + kChunk);
    std::vector<Example> ex;
    for (std::size_t i = lo; i < hi; ++i) {
      if (records[i]->observables.times.size() != rep.times.size()) {
        throw std::invalid_argument("evaluate: records have different grids");
      }
      ex.push_back(make_example(cfg, mode, *records[i]));
    }
    std::vector<const Example*> ptr;
    for (const auto& e : ex) ptr.push_back(&e);
    const Batch b = make_batch(ptr);
    const auto out = neural::forward(model, b.inputs, b.o0).outputs;
    for (std::size_t i = lo; i < hi; ++i) {
      Eigen::MatrixXd e(steps, cfg.output_width);
      for (Eigen::Index k = 0; k < steps; ++k) {
        const auto col = static_cast<Eigen::Index>(i - lo);
        e.row(k) = (out[static_cast<std::size_t>(k)].col(col) - b.targets[static_cast<std::size_t>(k)].col(col))
                       .array().square().matrix().transpose();
      }
      sq[i] = std::move(e);
    }
  });

  rep.mse_vs_time = Eigen::MatrixXd::Zero(steps, cfg.output_width);
  for (const auto& e : sq) {
    rep.mse_vs_time += e;
    double tr = 0.0, ex = 0.0;
    for (Eigen::Index k = 0; k < steps; ++k) (in_train[static_cast<std::size_t>(k)] ? tr : ex) += e.row(k).sum();
    rep.instance_train_mse.push_back(n_train_rows ? tr / static_cast<double>(n_train_rows * cfg.output_width) : 0.0);
    rep.instance_extrapolation_mse.push_back(n_extra_rows ? ex / static_cast<double>(n_extra_rows * cfg.output_width) : 0.0);
  }
  const double n = static_cast<double>(records.size());
  rep.mse_vs_time /= n;
  for (double v : rep.instance_train_mse) rep.train_window_mse += v;
  for (double v : rep.instance_extrapolation_mse) rep.extrapolation_mse += v;
  rep.train_window_mse /= n;
  rep.extrapolation_mse /= n;
  return rep;
}

dynamics::ObservableSeries run_nmr_protocol(const SystemConfig& system,
                                            const fields::DrivingField& schedule,
                                            const std::vector<dynamics::BlochVector>& initial_state,
                                            const SequenceModel* model) {
  if (system.kind != dynamics::HamiltonianKind::NmrZZ) {
    throw std::invalid_argument("run_nmr_protocol: NMR system required");
  }
  const auto& g = schedule.grid();
  const auto observables = system.observable_set();
  if (model) {
    return predict_dynamics(*model, {schedule}, encoder_input(initial_state, system.initial_states), observables);
  }
  const auto durations = dynamics::warp_time_grid(schedule, system.coupling, g.dt, g.n_steps);
  const auto labels = g.times();
  const auto spec = dynamics::HamiltonianSpec::nmr(system.coupling,
                                                   fields::DrivingField::constant(system.coupling, g));
  return dynamics::evolve_schrodinger_segments(dynamics::product_state(initial_state), spec, g.t_start,
                                               durations, system.substeps, observables, labels);
}

}  // namespace hamflow::pipeline
