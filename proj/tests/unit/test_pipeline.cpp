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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "doctest.h"
#include "hamflow/pipeline/inference.hpp"
#include "hamflow/pipeline/training.hpp"

using namespace hamflow;
using namespace hamflow::pipeline;
namespace fs = std::filesystem;

namespace {

DatasetConfig small_ring(int n_train, int n_val = 4, int n_test = 4) {
  DatasetConfig c;
  c.system = SystemConfig::tfim(3);
  c.n_train = n_train;
  c.n_validation = n_val;
  c.n_test = n_test;
  c.horizon = 1.0;
  c.test_horizon = 2.0;
  c.seed = 3;
  return c;
}

TrainOptions tiny_options(neural::Direction dir, int epochs) {
  TrainOptions o;
  o.direction = dir;
  o.shape.hidden = 6;
  o.shape.layers = 1;
  o.shape.encoder_layers = 2;
  o.shape.encoder_width = 5;
  o.training.epochs = epochs;
  o.training.batch_size = 4;
  return o;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("hamflow_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("empty dataset has a valid hash and round-trips") {
  auto c = small_ring(0, 0, 0);
  auto d = generate_dataset(c);
  CHECK(d.records.empty());
  CHECK(d.manifest.record_count == 0);
  CHECK(d.manifest.content_hash.size() == 64);
  const auto dir = scratch("empty");
  d.save(dir);
  auto back = Dataset::load(dir);
  CHECK(back.manifest.content_hash == d.manifest.content_hash);
  fs::remove_all(dir);
}

TEST_CASE("dataset generation is reproducible and independent of jobs") {
  auto c = small_ring(6);
  auto a = generate_dataset(c, 1);
  auto b = generate_dataset(c, 3);
  CHECK(a.manifest.content_hash == b.manifest.content_hash);
  c.seed = 4;
  CHECK(generate_dataset(c, 1).manifest.content_hash != a.manifest.content_hash);
}

TEST_CASE("records satisfy their invariants") {
  auto d = generate_dataset(small_ring(5));
  const auto expected = dynamics::ObservableSet::tfim_default(3).names();
  for (const auto& r : d.records) {
    REQUIRE(r.fields.size() == 1);
    CHECK(r.observables.times == r.fields[0].grid().times());
    CHECK(r.observables.observables.names() == expected);
    const auto& v = r.initial_state[0];
    CHECK(std::abs(std::hypot(v[0], v[1], v[2]) - 1.0) < 1e-12);
    for (const auto& b : r.initial_state) CHECK(b == v);
    CHECK(r.observables.values.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
  }
  CHECK(d.split("train").front()->observables.times.back() == doctest::Approx(1.0));
  CHECK(d.split("test").front()->observables.times.back() == doctest::Approx(2.0));
}

TEST_CASE("splits are disjoint and the hash covers every record") {
  auto d = generate_dataset(small_ring(8, 4, 6));
  std::set<std::string> train;
  for (const auto* r : d.split("train")) train.insert(r->hash());
  for (const auto* r : d.split("test")) CHECK(train.count(r->hash()) == 0);
  for (const auto* r : d.split("validation")) CHECK(train.count(r->hash()) == 0);
  CHECK(d.split("train").size() + d.split("validation").size() + d.split("test").size() == d.records.size());

  auto tampered = d;
  tampered.records[2].observables.values(3, 1) += 1e-15;
  CHECK(content_hash(tampered.manifest.config, tampered.records) != d.manifest.content_hash);

  const auto dir = scratch("tamper");
  d.save(dir);
  {
    std::ifstream in(dir / "records.jsonl");
    std::string text((std::istreambuf_iterator<char>(in)), {});
    const auto pos = text.find("\"seed\":");
    REQUIRE(pos != std::string::npos);
    text.insert(pos + 7, "1");
    std::ofstream(dir / "records.jsonl") << text;
  }
  CHECK_THROWS(Dataset::load(dir));
  fs::remove_all(dir);
}

TEST_CASE("saved datasets reload bit-identically") {
  auto d = generate_dataset(small_ring(3));
  const auto dir = scratch("reload");
  d.save(dir);
  auto back = Dataset::load(dir);
  REQUIRE(back.records.size() == d.records.size());
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    CHECK(back.records[i].hash() == d.records[i].hash());
    CHECK(back.records[i].split == d.records[i].split);
    CHECK((back.records[i].observables.values - d.records[i].observables.values).cwiseAbs().maxCoeff() == 0.0);
  }
  fs::remove_all(dir);
}

TEST_CASE("both directions train on the same manifest") {
  auto d = generate_dataset(small_ring(8));
  auto dyn = train(d, tiny_options(neural::Direction::Dynamics, 1));
  auto ham = train(d, tiny_options(neural::Direction::Hamiltonian, 1));
  CHECK(dyn.manifest_hash == d.manifest.content_hash);
  CHECK(ham.manifest_hash == d.manifest.content_hash);
  CHECK(dyn.model.config().output_width == 12);
  CHECK(ham.model.config().input_width == 13);
  CHECK(ham.model.config().output_width == 1);
}

TEST_CASE("hamiltonian inputs look one step ahead") {
  auto d = generate_dataset(small_ring(1, 0, 0));
  const auto& r = d.records.front();
  auto ham = train(d, tiny_options(neural::Direction::Hamiltonian, 1));
  const auto e = make_example(ham.model.config(), InitialStates::Broadcast, r);
  const auto& o = r.observables.values;
  const Eigen::Index n = o.rows();
  REQUIRE(e.inputs.rows() == n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    CHECK(e.inputs.row(k).head(o.cols()) == o.row(k + 1));
    CHECK(e.inputs(k, o.cols()) == r.observables.times[static_cast<std::size_t>(k)]);
  }
  CHECK(e.inputs.row(n - 1).head(o.cols()) == o.row(n - 1));

  // A held field step at t_k first moves the observables at t_{k+1}.
  auto sys = d.manifest.config.system;
  const auto grid = fields::UniformGrid::from_horizon(sys.dt, 1.0);
  std::vector<double> a(grid.n_points(), 0.5), b = a;
  b[4] = 2.0;
  const fields::DrivingField fa(grid, a, {}, fields::Interpolation::Hold);
  const fields::DrivingField fb(grid, b, {}, fields::Interpolation::Hold);
  const auto oa = simulate(sys, {fa}, r.initial_state);
  const auto ob = simulate(sys, {fb}, r.initial_state);
  CHECK((oa.values.topRows(5) - ob.values.topRows(5)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((oa.values.row(5) - ob.values.row(5)).cwiseAbs().maxCoeff() > 1e-4);
}

TEST_CASE("training is deterministic and resumable") {
  auto d = generate_dataset(small_ring(12));
  auto opt = tiny_options(neural::Direction::Dynamics, 4);
  auto a = train(d, opt);
  auto b = train(d, opt);
  REQUIRE(a.history.size() == 4);
  for (std::size_t e = 0; e < a.history.size(); ++e) {
    CHECK(a.history[e].train_loss == b.history[e].train_loss);
    CHECK(a.history[e].validation_loss == b.history[e].validation_loss);
  }
  CHECK(a.model.params() == b.model.params());

  auto threaded = opt;
  threaded.training.jobs = 3;
  auto c = train(d, threaded);
  CHECK(c.model.params() == a.model.params());

  const auto dir = scratch("resume");
  auto first = opt;
  first.state_dir = dir;
  first.on_epoch = [](const EpochStats& s) {
    if (s.epoch == 1) throw std::runtime_error("interrupted");
  };
  CHECK_THROWS_AS(train(d, first), std::runtime_error);
  REQUIRE(fs::exists(dir / "train_state.json"));
  auto second = opt;
  second.state_dir = dir;
  second.resume = true;
  auto resumed = train(d, second);
  REQUIRE(resumed.history.size() == a.history.size());
  for (std::size_t e = 0; e < a.history.size(); ++e) CHECK(resumed.history[e].train_loss == a.history[e].train_loss);
  CHECK(resumed.model.params() == a.model.params());

  auto other = second;
  other.training.learning_rate *= 2;
  CHECK_THROWS(train(d, other));
  fs::remove_all(dir);
}

TEST_CASE("toy Rabi run converges within 2000 steps") {
  DatasetConfig c;
  c.system = SystemConfig::tfim(3);
  c.system.coupling = 0.0;
  c.system.observables = {"X0", "Y0", "Z0"};
  c.n_train = 50;
  c.n_validation = 10;
  c.n_test = 0;
  c.horizon = 2.0;
  c.test_horizon = 2.0;
  c.generator.family = FieldFamily::Periodic;
  c.generator.amplitude = {-1.0, 1.0};
  c.generator.omega = {0.0, 0.0};
  c.seed = 21;
  auto d = generate_dataset(c);

  TrainOptions o;
  o.shape.hidden = 24;
  o.shape.layers = 1;
  o.shape.encoder_layers = 2;
  o.shape.encoder_width = 16;
  o.training.batch_size = 10;
  o.training.epochs = 400;  // 5 steps per epoch
  o.training.learning_rate = 1e-2;
  auto r = train(d, o);
  const double final_loss = r.history.back().train_loss;
  MESSAGE("final train MSE " << final_loss);
  CHECK(final_loss < 1e-3);
}

TEST_CASE("evaluation aggregates equal the mean of instances") {
  auto d = generate_dataset(small_ring(6, 2, 7));
  auto m = neural::SequenceModel::initialized(
      model_config_for(d.manifest.config.system, tiny_options(neural::Direction::Dynamics, 0).shape,
                       neural::Direction::Dynamics),
      5);
  auto rep = evaluate(m, d.split("test"), InitialStates::Broadcast, 1.0, 2);
  REQUIRE(rep.instances == 7);
  double tr = 0, ex = 0;
  for (int i = 0; i < 7; ++i) {
    tr += rep.instance_train_mse[i];
    ex += rep.instance_extrapolation_mse[i];
  }
  CHECK(std::abs(rep.train_window_mse - tr / 7) < 1e-12);
  CHECK(std::abs(rep.extrapolation_mse - ex / 7) < 1e-12);
  CHECK(rep.mse_vs_time.rows() == 21);
  CHECK(rep.columns.size() == 12);

  // Per-time rows reproduce the window aggregates.
  double tr_rows = 0;
  for (int k = 0; k <= 10; ++k) tr_rows += rep.mse_vs_time.row(k).mean();
  CHECK(std::abs(tr_rows / 11 - rep.train_window_mse) < 1e-12);

  auto serial = evaluate(m, d.split("test"), InitialStates::Broadcast, 1.0, 1);
  CHECK(serial.to_json().dump() == rep.to_json().dump());
}

TEST_CASE("a perfect predictor gives an all-zero report") {
  auto d = generate_dataset(small_ring(0, 0, 3));
  auto cfg = model_config_for(d.manifest.config.system, tiny_options(neural::Direction::Dynamics, 0).shape,
                              neural::Direction::Dynamics);
  auto m = neural::SequenceModel::initialized(cfg, 9);
  std::vector<Example> ex;
  for (const auto& r : d.records) ex.push_back(make_example(cfg, InitialStates::Broadcast, r));
  std::vector<const Example*> ep;
  for (const auto& e : ex) ep.push_back(&e);
  const auto b = make_batch(ep);
  const auto out = neural::forward(m, b.inputs, b.o0).outputs;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      d.records[i].observables.values.row(static_cast<Eigen::Index>(k)) =
          out[k].col(static_cast<Eigen::Index>(i)).transpose();
    }
  }
  std::vector<const TrajectoryRecord*> ptr;
  for (const auto& r : d.records) ptr.push_back(&r);
  auto rep = evaluate(m, ptr, InitialStates::Broadcast, 1.0);
  CHECK(rep.train_window_mse == 0.0);
  CHECK(rep.extrapolation_mse == 0.0);
  CHECK(rep.mse_vs_time.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("field-direction errors are rescaled by the field scale") {
  auto d = generate_dataset(small_ring(0, 0, 2));
  auto cfg = model_config_for(d.manifest.config.system, tiny_options(neural::Direction::Hamiltonian, 0).shape,
                              neural::Direction::Hamiltonian);
  REQUIRE(cfg.field_scale == 5.0);
  auto m = neural::SequenceModel::initialized(cfg, 2);
  auto rep = evaluate(m, d.split("test"), InitialStates::Broadcast, 1.0);
  CHECK(rep.rescale == 5.0);
  const auto& r = *d.split("test")[0];
  auto b = infer_field(m, r.observables, encoder_input(r.initial_state, InitialStates::Broadcast))[0];
  double want = 0;
  for (int k = 0; k <= 10; ++k) want += std::pow((b.values()[k] - r.fields[0].values()[k]) / 5.0, 2);
  CHECK(rep.instance_train_mse[0] == doctest::Approx(want / 11).epsilon(1e-12));
}

TEST_CASE("predict and infer respect grids and directions") {
  auto sys = SystemConfig::tfim(3);
  auto shape = tiny_options(neural::Direction::Dynamics, 0).shape;
  auto dyn = neural::SequenceModel::initialized(model_config_for(sys, shape, neural::Direction::Dynamics), 1);
  auto ham = neural::SequenceModel::initialized(model_config_for(sys, shape, neural::Direction::Hamiltonian), 1);
  auto g = fields::UniformGrid::from_horizon(0.1, 3.0);
  auto f = fields::DrivingField::constant(40.0, g);
  Eigen::Vector3d o0(0, 0, 1);
  Eigen::MatrixXd raw;
  auto s = predict_dynamics(dyn, {f}, o0, sys.observable_set(), &raw);
  CHECK(s.times.size() == 31);
  CHECK(s.values.rows() == 31);
  CHECK(s.observables.names() == sys.observable_set().names());
  CHECK(s.values.cwiseAbs().maxCoeff() <= 1.0);
  CHECK((s.values - raw.cwiseMax(-1.0).cwiseMin(1.0)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(predict_dynamics(ham, {f}, o0, sys.observable_set()), std::invalid_argument);
  CHECK_THROWS_AS(infer_field(dyn, s, o0), std::invalid_argument);
  CHECK_THROWS_AS(predict_dynamics(dyn, {f, f}, o0, sys.observable_set()), std::invalid_argument);

  auto b = infer_field(ham, s, o0);
  REQUIRE(b.size() == 1);
  CHECK(b[0].grid() == g);

  auto bent = s;
  bent.times[7] += 0.01;
  CHECK_THROWS_AS(infer_field(ham, bent, o0), std::invalid_argument);
  CHECK_THROWS_AS(infer_detuning(ham, sys, s, {{0, 0, 1}}), std::invalid_argument);
}

TEST_CASE("NMR protocol: 250 points, 15 Paulis, conditional-phase period") {
  auto sys = SystemConfig::nmr();
  auto g = nmr_protocol_grid();
  CHECK(g.n_points() == 250);
  CHECK(g.dt == doctest::Approx(200e-6));
  auto s = run_nmr_protocol(sys, fields::DrivingField::constant(sys.coupling, g), {{0, 0, 1}, {1, 0, 0}});
  REQUIRE(s.values.rows() == 250);
  REQUIRE(s.values.cols() == 15);
  for (const auto& p : s.observables.entries()) CHECK_FALSE(p.is_identity());
  CHECK(s.observables.index_of("I") == -1);
  const int x1 = s.observables.index_of("X1");
  REQUIRE(x1 >= 0);
  for (int k = 0; k < 250; ++k) {
    CHECK(std::abs(s.values(k, x1) - std::cos(std::numbers::pi * sys.coupling * s.times[k])) < 1e-8);
  }
  CHECK(2.0 / sys.coupling == doctest::Approx(2.868e-3).epsilon(1e-3));

  // A time-dependent schedule equals direct evolution under B(t).
  auto q = fields::make_quench({{0.0, 1.2 * sys.coupling}, {0.011, 0.7 * sys.coupling}}, g);
  auto warped = run_nmr_protocol(sys, q, {{0, 0, 1}, {1, 0, 0}});
  auto direct = simulate(sys, {q}, {{0, 0, 1}, {1, 0, 0}});
  CHECK((warped.values - direct.values).cwiseAbs().maxCoeff() < 1e-8);
  CHECK_THROWS_AS(run_nmr_protocol(SystemConfig::tfim(3), q, {{0, 0, 1}}), std::invalid_argument);
}

TEST_CASE("run config: defaults, overrides and key errors") {
  auto c = parse_run_config(nlohmann::json::object());
  CHECK(c.dataset.system.n_qubits == 5);
  CHECK(c.dataset.n_train == 2000);
  CHECK(c.model.hidden == 128);
  CHECK(c.training.epochs == 30);

  auto j = nlohmann::json::parse(R"({"schema_version":1,"seed":9,"system":{"kind":"nmr_zz"},"dataset":{"train":10}})");
  auto n = parse_run_config(j);
  CHECK(n.dataset.system.n_qubits == 2);
  CHECK(n.dataset.seed == 9);
  CHECK(n.dataset.n_train == 10);
  CHECK(n.dataset.system.observable_set().size() == 15);

  auto round = parse_run_config(nlohmann::json(n));
  CHECK(nlohmann::json(round).dump() == nlohmann::json(n).dump());

  try {
    parse_run_config(nlohmann::json::parse(R"({"training":{"epoch":3}})"));
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("training.epoch") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_run_config(nlohmann::json::parse(R"({"schema_version":2})")), ConfigError);
  CHECK_THROWS_AS(parse_run_config(nlohmann::json::parse(R"({"dataset":{"horizon":0.25}})")), ConfigError);
}

TEST_CASE("evaluation CSV has one column per output") {
  auto d = generate_dataset(small_ring(0, 0, 2));
  auto m = neural::SequenceModel::initialized(
      model_config_for(d.manifest.config.system, tiny_options(neural::Direction::Dynamics, 0).shape,
                       neural::Direction::Dynamics),
      5);
  auto rep = evaluate(m, d.split("test"), InitialStates::Broadcast, 1.0);
  const auto dir = scratch("csv");
  fs::create_directories(dir);
  rep.write_csv(dir / "mse.csv");
  std::ifstream in(dir / "mse.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("t,X0,", 0) == 0);
  CHECK(header.substr(header.size() - 5) == ",mean");
  fs::remove_all(dir);
}
