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

#include "hamflow/cli/app.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "hamflow/cli/repro.hpp"
#include "hamflow/cli/selftest.hpp"
#include "hamflow/pipeline/inference.hpp"
#include "hamflow/pipeline/training.hpp"

namespace hamflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using pipeline::RunConfig;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AcceptanceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options shared by every command.
struct Common {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 0;
  bool deterministic = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "JSON run configuration");
  app->add_option("--seed", c.seed, "Root seed (overrides HAMFLOW_SEED and the config file)")
      ->each([&c](const std::string&) { c.seed_given = true; });
  app->add_option("-j,--jobs", c.jobs, "Worker threads (default: available cores)")->check(CLI::PositiveNumber);
  app->add_flag("--deterministic", c.deterministic, "Serial execution and reductions");
}

// Precedence: --seed, then HAMFLOW_SEED, then the file, then built-in defaults.
RunConfig resolve(const Common& c, RunConfig base) {
  RunConfig cfg = c.config.empty() ? std::move(base) : pipeline::load_run_config(c.config);
  if (const char* env = std::getenv("HAMFLOW_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used != std::strlen(env)) throw std::invalid_argument(env);
      pipeline::apply_root_seed(cfg, v);
    } catch (const std::exception&) {
      throw UsageError(std::string("HAMFLOW_SEED: not an unsigned integer: ") + env);
    }
  }
  if (c.seed_given) pipeline::apply_root_seed(cfg, c.seed);
  return cfg;
}

int jobs_of(const Common& c) {
  if (c.deterministic) return 1;
  if (c.jobs > 0) return c.jobs;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

void log_line(const std::string& s) { std::cerr << s << '\n'; }

fs::path config_beside(const fs::path& out) {
  return out.parent_path() / (out.stem().string() + ".config.json");
}

neural::SequenceModel load_model(const fs::path& path, neural::Direction need, const char* command) {
  auto m = neural::SequenceModel::load(path);
  if (m.config().direction != need) {
    throw UsageError(std::string(command) + ": checkpoint direction is " + neural::to_string(m.config().direction) +
                     ", this command needs " + neural::to_string(need));
  }
  return m;
}

std::vector<dynamics::BlochVector> parse_state(const std::vector<std::string>& specs, const pipeline::SystemConfig& sys) {
  std::vector<dynamics::BlochVector> out;
  for (const auto& s : specs) {
    std::stringstream ss(s);
    std::string cell;
    dynamics::BlochVector v{};
    int i = 0;
    while (std::getline(ss, cell, ',')) {
      if (i >= 3) throw UsageError("--state: expected x,y,z");
      v[static_cast<std::size_t>(i++)] = std::stod(cell);
    }
    if (i != 3) throw UsageError("--state: expected x,y,z");
    out.push_back(v);
  }
  if (out.size() == 1 && sys.n_qubits > 1) out.assign(static_cast<std::size_t>(sys.n_qubits), out.front());
  if (static_cast<int>(out.size()) != sys.n_qubits) throw UsageError("--state: one vector or one per qubit required");
  return out;
}

// Columns of a `t,...` CSV as uniform-grid fields.
std::vector<fields::DrivingField> read_fields(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("t,", 0) != 0) throw UsageError(path.string() + ": first column must be 't'");
  std::vector<double> t;
  std::vector<std::vector<double>> cols;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 2) throw UsageError(path.string() + ": expected at least one field column");
    if (cols.empty()) cols.resize(row.size() - 1);
    if (row.size() != cols.size() + 1) throw UsageError(path.string() + ": ragged row");
    t.push_back(row[0]);
    for (std::size_t j = 0; j < cols.size(); ++j) cols[j].push_back(row[j + 1]);
  }
  const auto grid = pipeline::grid_from_times(t);
  std::vector<fields::DrivingField> out;
  for (auto& c : cols) out.emplace_back(grid, std::move(c));
  return out;
}

const pipeline::TrajectoryRecord& record_at(const pipeline::Dataset& d, const std::string& split, int index) {
  const auto recs = d.split(split);
  if (index < 0 || index >= static_cast<int>(recs.size())) {
    throw UsageError("--index: split '" + split + "' has " + std::to_string(recs.size()) + " records");
  }
  return *recs[static_cast<std::size_t>(index)];
}

int cmd_gen(const Common& c, const std::string& out) {
  auto cfg = resolve(c, pipeline::parse_run_config(json::object()));
  if (!out.empty()) cfg.paths.data = out;
  const auto data = pipeline::generate_dataset(cfg.dataset, jobs_of(c), log_line);
  data.save(cfg.paths.data);
  write_json(cfg.paths.data / "config.json", cfg);
  std::cout << "manifest " << data.manifest.content_hash << '\n'
            << "records " << data.manifest.record_count << '\n';
  return kOk;
}

int cmd_train(const Common& c, const std::string& direction, bool resume, const std::string& data_dir,
              const std::string& out) {
  auto cfg = resolve(c, pipeline::parse_run_config(json::object()));
  if (!direction.empty()) cfg.direction = neural::direction_from_string(direction);
  if (!cfg.direction) throw UsageError("train: --direction dynamics|hamiltonian is required");
  if (!data_dir.empty()) cfg.paths.data = data_dir;
  if (!out.empty()) cfg.paths.output = out;
  const auto data = pipeline::Dataset::load(cfg.paths.data);
  if (!cfg.expected_manifest_hash.empty() && cfg.expected_manifest_hash != data.manifest.content_hash) {
    throw UsageError("train: manifest hash " + data.manifest.content_hash + " differs from expected_manifest_hash " +
                     cfg.expected_manifest_hash);
  }
  cfg.expected_manifest_hash = data.manifest.content_hash;
  const fs::path dir = cfg.paths.output / neural::to_string(*cfg.direction);
  fs::create_directories(dir);
  write_json(dir / "config.json", cfg);

  pipeline::TrainOptions o;
  o.direction = *cfg.direction;
  o.shape = cfg.model;
  o.training = cfg.training;
  o.training.jobs = jobs_of(c);
  o.state_dir = dir;
  o.resume = resume;
  o.on_epoch = [](const pipeline::EpochStats& s) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "epoch %d: train %.4e validation %.4e lr %.3e", s.epoch, s.train_loss,
                  s.validation_loss, s.learning_rate);
    log_line(buf);
  };
  const auto r = pipeline::train(data, o);
  r.model.save(dir / "model.json");
  std::vector<double> ep, tr, va, lr;
  for (const auto& s : r.history) {
    ep.push_back(s.epoch);
    tr.push_back(s.train_loss);
    va.push_back(s.validation_loss);
    lr.push_back(s.learning_rate);
  }
  write_columns(dir / "history.csv", {"epoch", "train_loss", "validation_loss", "learning_rate"}, {ep, tr, va, lr});
  std::cout << "manifest " << r.manifest_hash << '\n'
            << "best_epoch " << r.best_epoch << '\n'
            << "checkpoint " << (dir / "model.json").string() << '\n';
  return kOk;
}

int cmd_predict(const Common& c, std::string model_path, const std::string& field_csv,
                const std::vector<std::string>& state, int index, const std::string& out) {
  auto cfg = resolve(c, pipeline::parse_run_config(json::object()));
  if (model_path.empty()) model_path = (cfg.paths.output / "dynamics" / "model.json").string();
  const auto model = load_model(model_path, neural::Direction::Dynamics, "predict");
  const auto& sys = cfg.dataset.system;
  std::vector<fields::DrivingField> f;
  std::vector<dynamics::BlochVector> init;
  if (!field_csv.empty()) {
    if (state.empty()) throw UsageError("predict: --state is required with --field");
    f = read_fields(field_csv);
    init = parse_state(state, sys);
  } else {
    const auto data = pipeline::Dataset::load(cfg.paths.data);
    const auto& r = record_at(data, "test", index);
    f = r.fields;
    init = r.initial_state;
  }
  const auto s = pipeline::predict_dynamics(model, f, pipeline::encoder_input(init, sys.initial_states),
                                            sys.observable_set());
  const fs::path dest = out.empty() ? cfg.paths.output / "prediction.csv" : fs::path(out);
  if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
  s.write_csv(dest);
  write_json(config_beside(dest), cfg);
  std::cout << "wrote " << dest.string() << '\n';
  return kOk;
}

int cmd_infer(const Common& c, std::string model_path, const std::string& obs_csv,
              const std::vector<std::string>& state, int index, const std::string& out) {
  auto cfg = resolve(c, pipeline::parse_run_config(json::object()));
  if (model_path.empty()) model_path = (cfg.paths.output / "hamiltonian" / "model.json").string();
  const auto model = load_model(model_path, neural::Direction::Hamiltonian, "infer");
  const auto& sys = cfg.dataset.system;
  dynamics::ObservableSeries obs;
  std::vector<dynamics::BlochVector> init;
  if (!obs_csv.empty()) {
    obs = dynamics::ObservableSeries::read_csv(obs_csv, sys.n_qubits);
    if (!state.empty()) init = parse_state(state, sys);
    else if (!sys.fixed_state.empty()) init = sys.fixed_state;
    else throw UsageError("infer: --state is required with --observables");
  } else {
    const auto data = pipeline::Dataset::load(cfg.paths.data);
    const auto& r = record_at(data, "test", index);
    obs = r.observables;
    init = r.initial_state;
  }
  if (obs.observables.names() != sys.observable_set().names()) {
    throw UsageError("infer: observable columns differ from the configured set");
  }
  const fs::path dest = out.empty() ? cfg.paths.output / "inferred_field.csv" : fs::path(out);
  if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
  if (sys.kind == dynamics::HamiltonianKind::ScSwapDetuned) {
    const auto d = pipeline::infer_detuning(model, sys, obs, init);
    write_columns(dest, {"t", "Delta1", "Delta2"}, {obs.times, d.delta1.values(), d.delta2.values()});
    std::cout << "closed_loop_mse " << d.closed_loop_mse << '\n';
  } else {
    const auto f = pipeline::infer_field(model, obs, pipeline::encoder_input(init, sys.initial_states));
    write_columns(dest, {"t", "B"}, {obs.times, f[0].values()});
  }
  write_json(config_beside(dest), cfg);
  std::cout << "wrote " << dest.string() << '\n';
  return kOk;
}

int cmd_eval(const Common& c, std::string model_path, const std::string& split, bool allow_train,
             const std::string& out) {
  auto cfg = resolve(c, pipeline::parse_run_config(json::object()));
  if (split != "test" && split != "validation" && split != "train") throw UsageError("eval: unknown split '" + split + "'");
  if (split != "test" && !allow_train) {
    throw UsageError("eval: refusing to evaluate on the '" + split + "' split without --allow-train-split");
  }
  if (model_path.empty()) {
    const auto dir = cfg.direction ? neural::to_string(*cfg.direction) : std::string("dynamics");
    model_path = (cfg.paths.output / dir / "model.json").string();
  }
  const auto model = neural::SequenceModel::load(model_path);
  if (cfg.direction && *cfg.direction != model.config().direction) {
    throw UsageError("eval: checkpoint direction is " + neural::to_string(model.config().direction) +
                     ", config asks for " + neural::to_string(*cfg.direction));
  }
  const auto data = pipeline::Dataset::load(cfg.paths.data);
  const auto rep = pipeline::evaluate(model, data.split(split), cfg.dataset.system.initial_states,
                                      cfg.dataset.horizon, jobs_of(c));
  const fs::path dir = out.empty() ? cfg.paths.output / "eval" : fs::path(out);
  fs::create_directories(dir);
  rep.write_json(dir / "eval.json");
  rep.write_csv(dir / "mse_vs_time.csv");
  write_json(dir / "config.json", cfg);
  std::cout << "instances " << rep.instances << '\n'
            << "train_window_mse " << rep.train_window_mse << '\n'
            << "extrapolation_mse " << rep.extrapolation_mse << '\n';
  return kOk;
}

int cmd_repro(const Common& c, const std::string& figure, const std::string& out) {
  ReproOptions o;
  o.config = resolve(c, repro_defaults(figure));
  o.output = out.empty() ? fs::path("hamflow_out") / ("repro_" + figure) : fs::path(out);
  o.jobs = jobs_of(c);
  o.log = log_line;
  const auto rep = run_repro(figure, o);
  for (const auto& k : rep.checks) {
    std::printf("%s %s: %.6g %s %.6g\n", k.passed ? "PASS" : "FAIL", k.id.c_str(), k.value, k.relation.c_str(),
                k.threshold);
  }
  std::printf("summary %s\n", (o.output / "summary.json").string().c_str());
  if (!rep.passed()) throw AcceptanceFailure(figure + ": failed " + rep.failures());
  return kOk;
}

int cmd_selftest(const std::vector<int>& suites) {
  const auto results = run_oracle_suite(suites);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%s [%d] %s (%.1fs): %s\n", r.passed ? "PASS" : "FAIL", r.criterion, r.name.c_str(), r.seconds,
                r.detail.c_str());
    ok = ok && r.passed;
  }
  if (!ok) throw AcceptanceFailure("selftest: oracle failures");
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Driven spin-system simulation and bidirectional sequence models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hamflow 1.0.0");

  Common common;
  std::string out, direction, data_dir, model, field_csv, obs_csv, split = "test", figure;
  std::vector<std::string> state;
  std::vector<int> suites{1, 2, 3, 4, 5, 6};
  bool resume = false, allow_train = false;
  int index = 0;

  auto* gen = app.add_subcommand("gen", "Simulate a dataset");
  add_common(gen, common);
  gen->add_option("-o,--out", out, "Dataset directory (overrides paths.data)");

  auto* train = app.add_subcommand("train", "Train one direction on a dataset");
  add_common(train, common);
  train->add_option("-d,--direction", direction, "dynamics or hamiltonian")
      ->check(CLI::IsMember({"dynamics", "hamiltonian"}));
  train->add_flag("--resume", resume, "Continue from the last completed epoch");
  train->add_option("--data", data_dir, "Dataset directory (overrides paths.data)");
  train->add_option("-o,--out", out, "Output directory (overrides paths.output)");

  auto* predict = app.add_subcommand("predict", "Predict observables from a field");
  add_common(predict, common);
  predict->add_option("-m,--model", model, "Dynamics checkpoint");
  predict->add_option("--field", field_csv, "CSV with columns t and one field per drive");
  predict->add_option("--state", state, "Initial Bloch vector x,y,z (once, or once per qubit)");
  predict->add_option("--index", index, "Test record to use when no --field is given");
  predict->add_option("-o,--out", out, "Output CSV");

  auto* infer = app.add_subcommand("infer", "Infer the driving field from observables");
  add_common(infer, common);
  infer->add_option("-m,--model", model, "Hamiltonian checkpoint");
  infer->add_option("--observables", obs_csv, "CSV with columns t and the observable names");
  infer->add_option("--state", state, "Initial Bloch vector x,y,z (once, or once per qubit)");
  infer->add_option("--index", index, "Test record to use when no --observables is given");
  infer->add_option("-o,--out", out, "Output CSV");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  add_common(eval, common);
  eval->add_option("-m,--model", model, "Checkpoint");
  eval->add_option("--split", split, "test (default), validation or train");
  eval->add_flag("--allow-train-split", allow_train, "Permit evaluation on train or validation records");
  eval->add_option("-o,--out", out, "Output directory");

  auto* repro = app.add_subcommand("repro", "Reproduce a figure at desk scale");
  add_common(repro, common);
  repro->add_option("figure", figure, "fig3, fig4ab, fig4cde or figS4")->required()->check(CLI::IsMember(repro_figures()));
  repro->add_option("-o,--out", out, "Output directory");

  auto* selftest = app.add_subcommand("selftest", "Run the analytic and statistical oracle suites");
  selftest->add_option("--suite", suites, "Suites to run (1-6)")->check(CLI::Range(1, 6));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(common, out);
    if (*train) return cmd_train(common, direction, resume, data_dir, out);
    if (*predict) return cmd_predict(common, model, field_csv, state, index, out);
    if (*infer) return cmd_infer(common, model, obs_csv, state, index, out);
    if (*eval) return cmd_eval(common, model, split, allow_train, out);
    if (*repro) return cmd_repro(common, figure, out);
    if (*selftest) return cmd_selftest(suites);
  } catch (const AcceptanceFailure& e) {
    std::cerr << "acceptance failure: " << e.what() << '\n';
    return kAcceptance;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace hamflow::cli
