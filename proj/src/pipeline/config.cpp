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

#include "hamflow/pipeline/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace hamflow::pipeline {

using nlohmann::json;
using dynamics::HamiltonianKind;

namespace {

std::string initial_states_name(InitialStates s) {
  switch (s) {
    case InitialStates::Broadcast: return "broadcast";
    case InitialStates::PerQubit: return "per_qubit";
    case InitialStates::Fixed: return "fixed";
  }
  return "broadcast";
}

InitialStates initial_states_from(const std::string& s) {
  if (s == "broadcast") return InitialStates::Broadcast;
  if (s == "per_qubit") return InitialStates::PerQubit;
  if (s == "fixed") return InitialStates::Fixed;
  throw std::invalid_argument("expected broadcast, per_qubit or fixed, got '" + s + "'");
}

json range_json(const fields::Range& r) { return json::array({r.lo, r.hi}); }

/// Reads known keys from one object and rejects the rest.
class Reader {
 public:
  Reader(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(where("") + "expected an object");
  }

  template <class T>
  bool get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return false;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
    return true;
  }

  void range(const std::string& key, fields::Range& out) {
    std::vector<double> v;
    if (!get(key, v)) return;
    if (v.size() != 2 || !(v[0] <= v[1])) throw ConfigError(where(key) + ": expected [lo, hi] with lo <= hi");
    out = {v[0], v[1]};
  }

  template <class F>
  void convert(const std::string& key, F&& apply) {
    std::string s;
    if (!get(key, s)) return;
    try {
      apply(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  Reader child(const std::string& key) {
    seen_.insert(key);
    return Reader(j_.at(key), where(key) + ".");
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(where(item.key()) + ": unknown key");
    }
  }

  std::string where(const std::string& key) const { return prefix_ + key; }

 private:
  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};


SystemConfig parse_system(Reader r, const SystemConfig& defaults) {
  SystemConfig s = defaults;
  r.convert("kind", [&](const std::string&) {});  // consumed by the caller
  r.get("n_qubits", s.n_qubits);
  r.get("coupling", s.coupling);
  r.get("dt", s.dt);
  r.get("substeps", s.substeps);
  r.get("observables", s.observables);
  r.convert("initial_states", [&](const std::string& v) { s.initial_states = initial_states_from(v); });
  std::vector<std::array<double, 3>> fixed;
  if (r.get("fixed_state", fixed)) s.fixed_state.assign(fixed.begin(), fixed.end());
  if (r.has("noise")) {
    Reader n = r.child("noise");
    n.get("enabled", s.noise.enabled);
    n.get("gamma", s.noise.gamma);
    n.finish();
  }
  r.finish();
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(r.where("") + e.what());
  }
  return s;
}

GeneratorConfig parse_generator(Reader r, GeneratorConfig g) {
  r.convert("family", [&](const std::string& v) { g.family = field_family_from_string(v); });
  r.range("c0", g.ranges.c0);
  r.range("sigma", g.ranges.sigma);
  r.range("heights", g.heights);
  r.range("amplitude", g.amplitude);
  r.range("omega", g.omega);
  r.get("offset", g.offset);
  r.get("scale", g.scale);
  r.finish();
  if (g.ranges.c0.lo < 0 || !(g.ranges.sigma.lo > 0)) {
    throw ConfigError(r.where("") + "c0 must be non-negative and sigma positive");
  }
  return g;
}

}  // namespace

DatasetConfig dataset_defaults(HamiltonianKind kind) {
  DatasetConfig d;
  switch (kind) {
    case HamiltonianKind::NmrZZ:
      d.system = SystemConfig::nmr();
      d.generator.ranges.sigma = {1e-3, 9e-3};
      d.generator.heights = {-2.0, 2.0};
      d.generator.amplitude = {-2.0, 2.0};
      d.generator.omega = {100.0, 1000.0};
      d.generator.offset = d.system.coupling;
      d.generator.scale = 0.25 * d.system.coupling;
      d.horizon = 0.02;
      d.test_horizon = 0.0498;
      break;
    case HamiltonianKind::ScSwapDetuned:
      d.system = SystemConfig::superconducting();
      d.generator.ranges.sigma = {0.01, 0.09};
      d.generator.omega = {10.0, 300.0};
      d.horizon = 0.02;
      d.test_horizon = 0.02;
      break;
    default:
      d.system = SystemConfig::tfim(5);
      d.system.kind = kind;
      break;
  }
  return d;
}

SystemConfig SystemConfig::tfim(int n_qubits) {
  SystemConfig s;
  s.n_qubits = n_qubits;
  return s;
}

SystemConfig SystemConfig::nmr() {
  SystemConfig s;
  s.kind = HamiltonianKind::NmrZZ;
  s.n_qubits = 2;
  s.coupling = 697.4;
  s.dt = 2e-4;
  s.initial_states = InitialStates::PerQubit;
  return s;
}

SystemConfig SystemConfig::superconducting() {
  SystemConfig s;
  s.kind = HamiltonianKind::ScSwapDetuned;
  s.n_qubits = 2;
  s.coupling = 12.75;
  s.dt = 0.002;
  s.observables = {"Z0", "Z1", "X0Y1", "Y0X1", "X0X1", "Y0Y1"};
  s.initial_states = InitialStates::Fixed;
  s.fixed_state = {{0.0, 0.0, -1.0}, {0.0, 0.0, 1.0}};
  return s;
}

dynamics::ObservableSet SystemConfig::observable_set() const {
  if (!observables.empty()) return dynamics::ObservableSet::from_names(observables, n_qubits);
  if (kind == HamiltonianKind::TfimRing) return dynamics::ObservableSet::tfim_default(n_qubits);
  if (n_qubits == 2) return dynamics::ObservableSet::two_qubit_paulis();
  throw std::invalid_argument("no default observable set for this system");
}

int SystemConfig::n_fields() const { return kind == HamiltonianKind::ScSwapDetuned ? 2 : 1; }

int SystemConfig::o0_width() const {
  return initial_states == InitialStates::Broadcast ? 3 : 3 * n_qubits;
}

void SystemConfig::validate() const {
  if (kind == HamiltonianKind::Custom) throw std::invalid_argument("kind: custom systems cannot generate datasets");
  if (kind == HamiltonianKind::TfimRing && n_qubits < 3) throw std::invalid_argument("n_qubits: ring needs at least 3 sites");
  if (kind != HamiltonianKind::TfimRing && n_qubits != 2) throw std::invalid_argument("n_qubits: two-qubit system expected");
  if (n_qubits > 12) throw std::invalid_argument("n_qubits: dense simulation limited to 12 qubits");
  if (!(dt > 0)) throw std::invalid_argument("dt: must be positive");
  if (substeps < 1) throw std::invalid_argument("substeps: must be at least 1");
  if (!(noise.gamma >= 0)) throw std::invalid_argument("noise.gamma: must be non-negative");
  if (initial_states == InitialStates::Fixed && static_cast<int>(fixed_state.size()) != n_qubits) {
    throw std::invalid_argument("fixed_state: one Bloch vector per qubit required");
  }
  (void)observable_set();
}

std::string to_string(FieldFamily f) {
  switch (f) {
    case FieldFamily::GpMixture: return "gp_mixture";
    case FieldFamily::Quench: return "quench";
    case FieldFamily::Periodic: return "periodic";
  }
  return "gp_mixture";
}

FieldFamily field_family_from_string(const std::string& s) {
  if (s == "gp_mixture") return FieldFamily::GpMixture;
  if (s == "quench") return FieldFamily::Quench;
  if (s == "periodic") return FieldFamily::Periodic;
  throw std::invalid_argument("expected gp_mixture, quench or periodic, got '" + s + "'");
}

void to_json(json& j, const SystemConfig& c) {
  std::vector<std::array<double, 3>> fixed(c.fixed_state.begin(), c.fixed_state.end());
  j = {{"kind", dynamics::to_string(c.kind)},
       {"n_qubits", c.n_qubits},
       {"coupling", c.coupling},
       {"dt", c.dt},
       {"substeps", c.substeps},
       {"observables", c.observable_set().names()},
       {"noise", {{"enabled", c.noise.enabled}, {"gamma", c.noise.gamma}}},
       {"initial_states", initial_states_name(c.initial_states)},
       {"fixed_state", fixed}};
}

void to_json(json& j, const GeneratorConfig& c) {
  j = {{"family", to_string(c.family)},    {"c0", range_json(c.ranges.c0)},
       {"sigma", range_json(c.ranges.sigma)}, {"heights", range_json(c.heights)},
       {"amplitude", range_json(c.amplitude)}, {"omega", range_json(c.omega)},
       {"offset", c.offset},                  {"scale", c.scale}};
}

void to_json(json& j, const DatasetConfig& c) {
  j = {{"system", c.system},       {"generator", c.generator},
       {"train", c.n_train},       {"validation", c.n_validation},
       {"test", c.n_test},         {"horizon", c.horizon},
       {"test_horizon", c.test_horizon}, {"seed", c.seed}};
}

void to_json(json& j, const ModelShape& c) {
  j = {{"hidden", c.hidden},
       {"layers", c.layers},
       {"encoder_layers", c.encoder_layers},
       {"encoder_width", c.encoder_width},
       {"field_scale", c.field_scale},
       {"time_scale", c.time_scale}};
}

void to_json(json& j, const TrainingConfig& c) {
  j = {{"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"learning_rate", c.learning_rate},
       {"final_lr_fraction", c.final_lr_fraction},
       {"seed", c.seed},
       {"jobs", c.jobs},
       {"validation_window", c.validation_window}};
}

void to_json(json& j, const RunConfig& c) {
  json d = c.dataset;
  d.erase("system");
  d.erase("generator");
  d.erase("seed");
  j = {{"schema_version", c.schema_version},
       {"seed", c.seed},
       {"system", c.dataset.system},
       {"generator", c.dataset.generator},
       {"dataset", d},
       {"model", c.model},
       {"training", c.training},
       {"paths", {{"data", c.paths.data.string()}, {"output", c.paths.output.string()}}}};
  if (c.direction) j["direction"] = neural::to_string(*c.direction);
  if (!c.expected_manifest_hash.empty()) j["expected_manifest_hash"] = c.expected_manifest_hash;
}

RunConfig parse_run_config(const json& j) {
  Reader root(j, "");
  RunConfig c;
  root.get("schema_version", c.schema_version);
  if (c.schema_version != kSchemaVersion) {
    throw ConfigError("schema_version: unsupported value " + std::to_string(c.schema_version));
  }
  root.get("seed", c.seed);

  HamiltonianKind kind = HamiltonianKind::TfimRing;
  if (j.contains("system") && j["system"].is_object() && j["system"].contains("kind")) {
    try {
      kind = dynamics::hamiltonian_kind_from_string(j["system"]["kind"].get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("system.kind: ") + e.what());
    }
  }
  c.dataset = dataset_defaults(kind);
  const bool has_n = j.contains("system") && j["system"].is_object() && j["system"].contains("n_qubits");
  if (kind == HamiltonianKind::TfimRing && !has_n) c.dataset.system.n_qubits = 5;
  if (root.has("system")) c.dataset.system = parse_system(root.child("system"), c.dataset.system);
  if (root.has("generator")) c.dataset.generator = parse_generator(root.child("generator"), c.dataset.generator);
  c.dataset.seed = c.seed;
  if (root.has("dataset")) {
    Reader d = root.child("dataset");
    d.get("train", c.dataset.n_train);
    d.get("validation", c.dataset.n_validation);
    d.get("test", c.dataset.n_test);
    d.get("horizon", c.dataset.horizon);
    d.get("test_horizon", c.dataset.test_horizon);
    d.finish();
    if (c.dataset.n_train < 0 || c.dataset.n_validation < 0 || c.dataset.n_test < 0) {
      throw ConfigError("dataset: record counts must be non-negative");
    }
    if (!(c.dataset.horizon > 0) || !(c.dataset.test_horizon > 0)) {
      throw ConfigError("dataset.horizon: must be positive");
    }
  }
  for (const double h : {c.dataset.horizon, c.dataset.test_horizon}) {
    try {
      (void)fields::UniformGrid::from_horizon(c.dataset.system.dt, h);
    } catch (const std::invalid_argument&) {
      throw ConfigError("dataset.horizon: horizons must be multiples of system.dt");
    }
  }
  if (root.has("model")) {
    Reader m = root.child("model");
    m.get("hidden", c.model.hidden);
    m.get("layers", c.model.layers);
    m.get("encoder_layers", c.model.encoder_layers);
    m.get("encoder_width", c.model.encoder_width);
    m.get("field_scale", c.model.field_scale);
    m.get("time_scale", c.model.time_scale);
    m.finish();
    if (c.model.hidden < 1 || c.model.layers < 1 || c.model.encoder_layers < 1 || c.model.encoder_width < 1) {
      throw ConfigError("model: sizes must be positive");
    }
  }
  bool training_seed_given = false;
  if (root.has("training")) {
    Reader t = root.child("training");
    t.get("epochs", c.training.epochs);
    t.get("batch_size", c.training.batch_size);
    t.get("learning_rate", c.training.learning_rate);
    t.get("final_lr_fraction", c.training.final_lr_fraction);
    training_seed_given = t.get("seed", c.training.seed);
    t.get("jobs", c.training.jobs);
    t.get("validation_window", c.training.validation_window);
    t.finish();
    if (c.training.epochs < 0) throw ConfigError("training.epochs: must be non-negative");
    if (c.training.batch_size < 1) throw ConfigError("training.batch_size: must be positive");
    if (!(c.training.learning_rate > 0)) throw ConfigError("training.learning_rate: must be positive");
    if (c.training.jobs < 1) throw ConfigError("training.jobs: must be positive");
  }
  if (root.has("paths")) {
    Reader p = root.child("paths");
    std::string s;
    if (p.get("data", s)) c.paths.data = s;
    if (p.get("output", s)) c.paths.output = s;
    p.finish();
  }
  if (!training_seed_given) c.training.seed = training_seed_for(c.seed);
  root.convert("direction", [&](const std::string& v) { c.direction = neural::direction_from_string(v); });
  root.get("expected_manifest_hash", c.expected_manifest_hash);
  root.finish();
  return c;
}

std::uint64_t training_seed_for(std::uint64_t root_seed) { return root_seed + kTrainingStream; }

void apply_root_seed(RunConfig& c, std::uint64_t seed) {
  c.seed = seed;
  c.dataset.seed = seed;
  c.training.seed = training_seed_for(seed);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

neural::ModelConfig model_config_for(const SystemConfig& system, const ModelShape& shape,
                                     neural::Direction direction) {
  neural::ModelConfig m;
  m.direction = direction;
  const int n_obs = static_cast<int>(system.observable_set().size());
  const int n_fields = system.n_fields();
  m.input_width = (direction == neural::Direction::Dynamics ? n_fields : n_obs) + 1;
  m.output_width = direction == neural::Direction::Dynamics ? n_obs : n_fields;
  m.o0_width = system.o0_width();
  m.hidden = shape.hidden;
  m.layers = shape.layers;
  m.encoder_layers = shape.encoder_layers;
  m.encoder_width = shape.encoder_width;
  m.field_scale = shape.field_scale;
  if (m.field_scale == 0.0) {
    m.field_scale = system.kind == HamiltonianKind::NmrZZ ? system.coupling : 5.0;
  }
  m.time_scale = shape.time_scale;
  if (m.time_scale == 0.0) {
    m.time_scale = system.kind == HamiltonianKind::TfimRing ? 1.0 : 1e-2;
  }
  m.validate();
  return m;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace hamflow::pipeline
