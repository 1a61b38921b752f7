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

#include "hamflow/pipeline/dataset.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "hamflow/dynamics/evolve.hpp"

namespace hamflow::dynamics {

using nlohmann::json;

void to_json(json& j, const ObservableSeries& s) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(s.values.rows()));
  for (Eigen::Index r = 0; r < s.values.rows(); ++r) {
    rows[static_cast<std::size_t>(r)].assign(s.values.cols(), 0.0);
    for (Eigen::Index c = 0; c < s.values.cols(); ++c) rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = s.values(r, c);
  }
  j = {{"n_qubits", s.observables.system_size()},
       {"names", s.observables.names()},
       {"times", s.times},
       {"values", rows}};
}

void from_json(const json& j, ObservableSeries& s) {
  s.observables = ObservableSet::from_names(j.at("names").get<std::vector<std::string>>(),
                                                      j.at("n_qubits").get<int>());
  s.times = j.at("times").get<std::vector<double>>();
  const auto rows = j.at("values").get<std::vector<std::vector<double>>>();
  if (rows.size() != s.times.size()) throw std::invalid_argument("observable series: row count mismatch");
  s.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(s.observables.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != s.observables.size()) throw std::invalid_argument("observable series: column count mismatch");
    for (std::size_t c = 0; c < rows[r].size(); ++c) s.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
}

}  // namespace hamflow::dynamics

namespace hamflow::pipeline {

using nlohmann::json;
using dynamics::BlochVector;
using dynamics::HamiltonianKind;
using fields::DrivingField;

namespace {

constexpr int kMaxAttempts = 8;
constexpr std::uint64_t kRetryStride = std::uint64_t{1} << 40;

DatasetConfig dataset_config_from_json(const json& j) {
  json tree = {{"schema_version", kSchemaVersion},
               {"seed", j.at("seed")},
               {"system", j.at("system")},
               {"generator", j.at("generator")},
               {"dataset",
                {{"train", j.at("train")},
                 {"validation", j.at("validation")},
                 {"test", j.at("test")},
                 {"horizon", j.at("horizon")},
                 {"test_horizon", j.at("test_horizon")}}}};
  return parse_run_config(tree).dataset;
}

}  // namespace

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void to_json(json& j, const TrajectoryRecord& r) {
  std::vector<std::array<double, 3>> init(r.initial_state.begin(), r.initial_state.end());
  j = {{"kind", dynamics::to_string(r.kind)},
       {"fields", r.fields},
       {"initial_state", init},
       {"observables", r.observables},
       {"noise", r.noise},
       {"gamma", r.gamma},
       {"seed", r.seed},
       {"split", r.split}};
}

void from_json(const json& j, TrajectoryRecord& r) {
  r.kind = dynamics::hamiltonian_kind_from_string(j.at("kind").get<std::string>());
  r.fields = j.at("fields").get<std::vector<DrivingField>>();
  const auto init = j.at("initial_state").get<std::vector<std::array<double, 3>>>();
  r.initial_state.assign(init.begin(), init.end());
  r.observables = j.at("observables").get<dynamics::ObservableSeries>();
  r.noise = j.at("noise").get<bool>();
  r.gamma = j.at("gamma").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.split = j.at("split").get<std::string>();
}

std::string TrajectoryRecord::hash() const {
  json j = *this;
  j.erase("split");
  return sha256_hex(j.dump());
}

Eigen::VectorXd encoder_input(const std::vector<BlochVector>& state, InitialStates mode) {
  if (state.empty()) throw std::invalid_argument("encoder_input: empty state");
  const std::size_t n = mode == InitialStates::Broadcast ? 1 : state.size();
  Eigen::VectorXd o0(3 * static_cast<Eigen::Index>(n));
  for (std::size_t q = 0; q < n; ++q) {
    for (int a = 0; a < 3; ++a) o0[static_cast<Eigen::Index>(3 * q) + a] = state[q][static_cast<std::size_t>(a)];
  }
  return o0;
}

void to_json(json& j, const DatasetManifest& m) {
  j = {{"format", "hamflow-dataset"},
       {"record_count", m.record_count},
       {"config", m.config},
       {"content_hash", m.content_hash},
       {"splits",
        {{"train", m.splits.train}, {"validation", m.splits.validation}, {"test", m.splits.test}}},
       {"regenerated", m.regenerated}};
}

std::vector<const TrajectoryRecord*> Dataset::split(const std::string& name) const {
  const std::vector<int>* idx = nullptr;
  if (name == "train") idx = &manifest.splits.train;
  if (name == "validation") idx = &manifest.splits.validation;
  if (name == "test") idx = &manifest.splits.test;
  if (!idx) throw std::invalid_argument("unknown split '" + name + "'");
  std::vector<const TrajectoryRecord*> out;
  for (int i : *idx) out.push_back(&records.at(static_cast<std::size_t>(i)));
  return out;
}

void Dataset::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "records.jsonl");
    if (!f) throw std::runtime_error("cannot write " + (dir / "records.jsonl").string());
    for (const auto& r : records) f << json(r).dump() << '\n';
  }
  std::ofstream f(dir / "manifest.json");
  if (!f) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  f << json(manifest).dump(2) << '\n';
}

Dataset Dataset::load(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw std::runtime_error("missing dataset manifest in " + dir.string());
  const json mj = json::parse(mf);
  if (mj.value("format", "") != "hamflow-dataset") throw std::invalid_argument("not a dataset manifest");
  Dataset d;
  d.manifest.record_count = mj.at("record_count").get<int>();
  d.manifest.config = dataset_config_from_json(mj.at("config"));
  d.manifest.content_hash = mj.at("content_hash").get<std::string>();
  d.manifest.splits.train = mj.at("splits").at("train").get<std::vector<int>>();
  d.manifest.splits.validation = mj.at("splits").at("validation").get<std::vector<int>>();
  d.manifest.splits.test = mj.at("splits").at("test").get<std::vector<int>>();
  d.manifest.regenerated = mj.value("regenerated", 0);
  std::ifstream rf(dir / "records.jsonl");
  if (!rf) throw std::runtime_error("missing records file in " + dir.string());
  std::string line;
  while (std::getline(rf, line)) {
    if (!line.empty()) d.records.push_back(json::parse(line).get<TrajectoryRecord>());
  }
  if (static_cast<int>(d.records.size()) != d.manifest.record_count) {
    throw std::runtime_error("dataset record count does not match its manifest");
  }
  if (content_hash(d.manifest.config, d.records) != d.manifest.content_hash) {
    throw std::runtime_error("dataset content hash mismatch in " + dir.string());
  }
  return d;
}

std::string content_hash(const DatasetConfig& config, const std::vector<TrajectoryRecord>& records) {
  std::string text = json(config).dump();
  text += '\n';
  for (const auto& r : records) text += r.hash() + ':' + r.split + '\n';
  return sha256_hex(text);
}

dynamics::ObservableSeries simulate(const SystemConfig& system, const std::vector<DrivingField>& flds,
                                    const std::vector<BlochVector>& initial_state) {
  if (static_cast<int>(flds.size()) != system.n_fields()) {
    throw std::invalid_argument("simulate: wrong number of fields for this system");
  }
  dynamics::HamiltonianSpec spec;
  switch (system.kind) {
    case HamiltonianKind::TfimRing:
      spec = dynamics::HamiltonianSpec::tfim(system.n_qubits, system.coupling, flds[0]);
      break;
    case HamiltonianKind::NmrZZ:
      spec = dynamics::HamiltonianSpec::nmr(system.coupling, flds[0]);
      break;
    case HamiltonianKind::ScSwapDetuned:
      if (!(flds[0].grid() == flds[1].grid())) throw std::invalid_argument("simulate: detuning grids differ");
      spec = dynamics::HamiltonianSpec::superconducting(system.coupling, flds[0], flds[1]);
      break;
    default:
      throw std::invalid_argument("simulate: unsupported system kind");
  }
  const auto grid = dynamics::TimeGrid::from_uniform(flds[0].grid(), system.substeps);
  const auto psi0 = dynamics::product_state(initial_state);
  const auto obs = system.observable_set();
  if (system.noise.enabled) {
    return dynamics::evolve_lindblad(dynamics::DensityMatrix::from_pure(psi0), spec, grid, obs,
                                     system.noise.gamma);
  }
  return dynamics::evolve_schrodinger(psi0, spec, grid, obs);
}

std::vector<DrivingField> draw_fields(fields::Rng& rng, const SystemConfig& system,
                                      const GeneratorConfig& gen, const fields::UniformGrid& grid) {
  std::vector<DrivingField> out;
  for (int k = 0; k < system.n_fields(); ++k) {
    DrivingField f;
    switch (gen.family) {
      case FieldFamily::GpMixture: f = fields::sample_gp_mixture(rng, grid, gen.ranges); break;
      case FieldFamily::Quench: f = fields::random_quench(rng, grid, gen.heights); break;
      case FieldFamily::Periodic: f = fields::random_periodic(rng, grid, gen.amplitude, gen.omega); break;
    }
    out.push_back(f.scaled(gen.scale, gen.offset));
  }
  return out;
}

std::vector<BlochVector> draw_initial_state(fields::Rng& rng, const SystemConfig& system) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto n = static_cast<std::size_t>(system.n_qubits);
  switch (system.initial_states) {
    case InitialStates::Broadcast: {
      const double u1 = u(rng);
      const double u2 = u(rng);
      return std::vector<BlochVector>(n, dynamics::uniform_bloch_vector(u1, u2));
    }
    case InitialStates::PerQubit: {
      std::vector<BlochVector> v;
      for (std::size_t q = 0; q < n; ++q) {
        const double u1 = u(rng);
        const double u2 = u(rng);
        v.push_back(dynamics::uniform_bloch_vector(u1, u2));
      }
      return v;
    }
    case InitialStates::Fixed:
      return system.fixed_state;
  }
  return {};
}

Dataset generate_dataset(const DatasetConfig& config, int jobs, const Logger& log) {
  config.system.validate();
  const int n_total = config.n_train + config.n_validation + config.n_test;
  const auto train_grid = fields::UniformGrid::from_horizon(config.system.dt, config.horizon);
  const auto test_grid = fields::UniformGrid::from_horizon(config.system.dt, config.test_horizon);
  Dataset d;
  d.manifest.config = config;
  d.records.resize(static_cast<std::size_t>(std::max(0, n_total)));
  std::vector<int> retries(d.records.size(), 0);
  std::mutex log_mu;

  parallel_for(n_total, jobs, [&](int i) {
    const bool is_test = i >= config.n_train + config.n_validation;
    TrajectoryRecord& rec = d.records[static_cast<std::size_t>(i)];
    rec.split = i < config.n_train ? "train" : (is_test ? "test" : "validation");
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t stream = static_cast<std::uint64_t>(i) + kRetryStride * static_cast<std::uint64_t>(attempt);
      auto rng = fields::make_rng(config.seed, stream);
      auto init = draw_initial_state(rng, config.system);
      auto flds = draw_fields(rng, config.system, config.generator, is_test ? test_grid : train_grid);
      try {
        rec.observables = simulate(config.system, flds, init);
      } catch (const NumericalError& e) {
        if (log) {
          std::lock_guard lock(log_mu);
          log("record " + std::to_string(i) + " rejected (" + e.what() + "), redrawing");
        }
        if (attempt + 1 >= kMaxAttempts) throw;
        ++retries[static_cast<std::size_t>(i)];
        continue;
      }
      rec.kind = config.system.kind;
      rec.fields = std::move(flds);
      rec.initial_state = std::move(init);
      rec.noise = config.system.noise.enabled;
      rec.gamma = rec.noise ? config.system.noise.gamma : 0.0;
      rec.seed = stream;
      break;
    }
  });

  for (int i = 0; i < n_total; ++i) {
    const auto& s = d.records[static_cast<std::size_t>(i)].split;
    (s == "train" ? d.manifest.splits.train : s == "test" ? d.manifest.splits.test : d.manifest.splits.validation).push_back(i);
    d.manifest.regenerated += retries[static_cast<std::size_t>(i)];
  }
  d.manifest.record_count = n_total;
  d.manifest.content_hash = content_hash(config, d.records);
  return d;
}

}  // namespace hamflow::pipeline
