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

#include "hamflow/cli/repro.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hamflow/fields/generators.hpp"
#include "hamflow/pipeline/inference.hpp"
#include "hamflow/pipeline/training.hpp"

namespace hamflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using pipeline::Dataset;
using pipeline::DatasetConfig;
using pipeline::EvalReport;
using pipeline::RunConfig;
using neural::Direction;

namespace {

// Stream offsets under the dataset seed for auxiliary test sets and schedules.
constexpr std::uint64_t kQuenchStream = 1001;
constexpr std::uint64_t kPeriodicStream = 1002;
constexpr std::uint64_t kScheduleStream = 1003;
constexpr std::uint64_t kDetuningStream = 1004;

void say(const ReproOptions& o, const std::string& msg) {
  if (o.log) o.log(msg);
}

void add(ReproReport& r, std::string id, double value, std::string relation, double threshold) {
  Check c{std::move(id), value, std::move(relation), threshold, false};
  if (c.relation == "<") c.passed = value < threshold;
  else if (c.relation == "<=") c.passed = value <= threshold;
  else c.passed = value >= threshold;
  c.passed = c.passed && std::isfinite(value);
  r.checks.push_back(std::move(c));
}

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j) {
  return {m.col(j).data(), m.col(j).data() + m.rows()};
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double mse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

int rows_within(const std::vector<double>& t, double window) {
  int n = 0;
  while (n < static_cast<int>(t.size()) && t[static_cast<std::size_t>(n)] <= window * (1.0 + 1e-12)) ++n;
  return n;
}

std::string file_sha256(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  return pipeline::sha256_hex(bytes);
}

pipeline::TrainResult train_model(const Dataset& data, const RunConfig& cfg, Direction dir,
                                  const ReproOptions& o, const std::string& tag) {
  pipeline::TrainOptions t;
  t.direction = dir;
  t.shape = cfg.model;
  t.training = cfg.training;
  t.training.jobs = o.jobs;
  t.on_epoch = [&](const pipeline::EpochStats& s) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s epoch %d: train %.4e validation %.4e", tag.c_str(), s.epoch,
                  s.train_loss, s.validation_loss);
    say(o, buf);
  };
  auto r = pipeline::train(data, t);
  std::vector<double> ep, tr, va, lr;
  for (const auto& s : r.history) {
    ep.push_back(s.epoch);
    tr.push_back(s.train_loss);
    va.push_back(s.validation_loss);
    lr.push_back(s.learning_rate);
  }
  write_columns(o.output / (tag + "_history.csv"), {"epoch", "train_loss", "validation_loss", "learning_rate"},
                {ep, tr, va, lr});
  r.model.save(o.output / (tag + "_model.json"));
  return r;
}

json training_summary(const pipeline::TrainResult& r, const fs::path& checkpoint) {
  return {{"best_epoch", r.best_epoch},
          {"final_train_loss", r.history.empty() ? json(nullptr) : nullable(r.history.back().train_loss)},
          {"best_validation_loss",
           r.best_epoch < 0 ? json(nullptr) : nullable(r.history[static_cast<std::size_t>(r.best_epoch)].validation_loss)},
          {"checkpoint_sha256", file_sha256(checkpoint)}};
}

json eval_summary(const EvalReport& e) {
  return {{"instances", e.instances},
          {"train_window_mse", nullable(e.train_window_mse)},
          {"extrapolation_mse", nullable(e.extrapolation_mse)},
          {"rescale", e.rescale}};
}

EvalReport evaluate_split(const pipeline::TrainResult& r, const Dataset& d, const std::string& split,
                          double window, const ReproOptions& o, const std::string& tag) {
  auto rep = pipeline::evaluate(r.model, d.split(split), d.manifest.config.system.initial_states, window, o.jobs);
  rep.write_json(o.output / (tag + "_eval.json"));
  rep.write_csv(o.output / (tag + "_mse_vs_time.csv"));
  return rep;
}

Dataset family_test_set(const DatasetConfig& base, pipeline::FieldFamily family, std::uint64_t stream,
                        int jobs) {
  DatasetConfig c = base;
  c.generator.family = family;
  c.n_train = 0;
  c.n_validation = 0;
  c.test_horizon = base.horizon;
  c.seed = base.seed + stream;
  return pipeline::generate_dataset(c, jobs);
}

void write_series_pair(const fs::path& path, const std::vector<fields::DrivingField>& drive,
                       const std::vector<std::string>& drive_names, const dynamics::ObservableSeries& a,
                       const std::string& a_tag, const dynamics::ObservableSeries& b, const std::string& b_tag) {
  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> cols{a.times};
  for (std::size_t j = 0; j < drive.size(); ++j) {
    header.push_back(drive_names[j]);
    cols.push_back(drive[j].values());
  }
  const auto names = a.observables.names();
  for (std::size_t j = 0; j < names.size(); ++j) {
    header.push_back(a_tag + "_" + names[j]);
    cols.push_back(column(a.values, static_cast<Eigen::Index>(j)));
  }
  for (std::size_t j = 0; j < names.size(); ++j) {
    header.push_back(b_tag + "_" + names[j]);
    cols.push_back(column(b.values, static_cast<Eigen::Index>(j)));
  }
  write_columns(path, header, cols);
}

ReproReport fig3(const ReproOptions& o) {
  ReproReport rep;
  const auto& cfg = o.config;
  const auto& dc = cfg.dataset;
  const auto& sys = dc.system;
  say(o, "generating dataset");
  const Dataset data = pipeline::generate_dataset(dc, o.jobs, o.log);
  const auto dyn = train_model(data, cfg, Direction::Dynamics, o, "dynamics");
  const auto ham = train_model(data, cfg, Direction::Hamiltonian, o, "hamiltonian");

  say(o, "evaluating");
  const auto dyn_eval = evaluate_split(dyn, data, "test", dc.horizon, o, "dynamics");
  const auto ham_eval = evaluate_split(ham, data, "test", dc.horizon, o, "hamiltonian");

  json families = json::object();
  double family_mse[2] = {0.0, 0.0};
  const std::pair<pipeline::FieldFamily, std::uint64_t> fams[2] = {{pipeline::FieldFamily::Quench, kQuenchStream},
                                                                   {pipeline::FieldFamily::Periodic, kPeriodicStream}};
  for (int f = 0; f < 2; ++f) {
    const auto set = family_test_set(dc, fams[f].first, fams[f].second, o.jobs);
    const auto name = pipeline::to_string(fams[f].first);
    const auto e = evaluate_split(ham, set, "test", dc.horizon, o, "field_" + name);
    family_mse[f] = e.train_window_mse;
    families[name] = eval_summary(e);
  }

  // Closed loop: infer the field on the train window, re-simulate, compare observables.
  const auto test = data.split("test");
  std::vector<double> closed(test.size());
  pipeline::parallel_for(static_cast<int>(test.size()), o.jobs, [&](int i) {
    const auto& r = *test[static_cast<std::size_t>(i)];
    const auto obs = r.observables.prefix(rows_within(r.observables.times, dc.horizon));
    const auto b = pipeline::infer_field(ham.model, obs, pipeline::encoder_input(r.initial_state, sys.initial_states));
    const auto again = pipeline::simulate(sys, b, r.initial_state);
    closed[static_cast<std::size_t>(i)] = mse(again.values, obs.values);
  });
  const double closed_mse = mean(closed);
  const double direct_mse = dyn_eval.train_window_mse;

  // Constant fields from the all-up state should infer back to near-constant fields.
  json constant = json::array();
  double worst_ratio = 0.0;
  const auto grid = fields::UniformGrid::from_horizon(sys.dt, dc.horizon);
  for (double b : {-3.0, -2.0, -1.0, 1.0, 2.0, 3.0}) {
    const std::vector<dynamics::BlochVector> init(static_cast<std::size_t>(sys.n_qubits), {0.0, 0.0, 1.0});
    const auto obs = pipeline::simulate(sys, {fields::DrivingField::constant(b, grid)}, init);
    const auto v = pipeline::infer_field(ham.model, obs, pipeline::encoder_input(init, sys.initial_states))[0].values();
    const double mu = mean(v);
    double s2 = 0.0;
    for (double x : v) s2 += (x - mu) * (x - mu);
    const double sd = std::sqrt(s2 / static_cast<double>(v.size()));
    worst_ratio = std::max(worst_ratio, sd / std::abs(mu));
    constant.push_back({{"B", b}, {"mean", mu}, {"std", sd}, {"std_over_mean", sd / std::abs(mu)}});
  }

  // One held-out instance in both directions for plotting.
  {
    const auto& r = *test.front();
    const auto o0 = pipeline::encoder_input(r.initial_state, sys.initial_states);
    const auto pred = pipeline::predict_dynamics(dyn.model, r.fields, o0, sys.observable_set());
    write_series_pair(o.output / "example_dynamics.csv", r.fields, {"B"}, r.observables, "simulated", pred,
                      "predicted");
    const auto b = pipeline::infer_field(ham.model, r.observables, o0);
    write_columns(o.output / "example_field.csv", {"t", "B_true", "B_inferred"},
                  {r.observables.times, r.fields[0].values(), b[0].values()});
  }

  add(rep, "dynamics_train_window_mse", dyn_eval.train_window_mse, "<", 1e-2);
  add(rep, "dynamics_extrapolation_mse", dyn_eval.extrapolation_mse, "<", 1e-1);
  add(rep, "dynamics_extrapolation_over_train", dyn_eval.extrapolation_mse / dyn_eval.train_window_mse, ">=", 1.0);
  add(rep, "hamiltonian_extrapolation_over_train", ham_eval.extrapolation_mse / ham_eval.train_window_mse, ">=", 1.0);
  add(rep, "field_quench_rescaled_mse", family_mse[0], "<", 2e-2);
  add(rep, "field_periodic_rescaled_mse", family_mse[1], "<", 2e-2);
  add(rep, "closed_loop_over_direct", closed_mse / direct_mse, "<=", 4.0);
  add(rep, "constant_field_std_over_mean", worst_ratio, "<", 0.1);

  rep.summary = {{"manifest_hash", data.manifest.content_hash},
                 {"records", data.manifest.record_count},
                 {"dynamics", {{"training", training_summary(dyn, o.output / "dynamics_model.json")},
                               {"test", eval_summary(dyn_eval)}}},
                 {"hamiltonian", {{"training", training_summary(ham, o.output / "hamiltonian_model.json")},
                                  {"test", eval_summary(ham_eval)}}},
                 {"field_inference", families},
                 {"closed_loop", {{"observable_mse", closed_mse}, {"direct_prediction_mse", direct_mse}}},
                 {"constant_field", constant}};
  return rep;
}

ReproReport fig4ab(const ReproOptions& o) {
  ReproReport rep;
  const auto& cfg = o.config;
  const auto& dc = cfg.dataset;
  const auto& sys = dc.system;
  const std::vector<dynamics::BlochVector> init{{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}};
  const auto grid = pipeline::nmr_protocol_grid();

  // Simulator reference at constant coupling.
  const auto ref = pipeline::run_nmr_protocol(sys, fields::DrivingField::constant(sys.coupling, grid), init);
  const auto x1 = static_cast<Eigen::Index>(ref.observables.index_of("X1"));
  double phase_err = 0.0;
  for (std::size_t k = 0; k < ref.times.size(); ++k) {
    phase_err = std::max(phase_err, std::abs(ref.values(static_cast<Eigen::Index>(k), x1) -
                                             std::cos(std::acos(-1.0) * sys.coupling * ref.times[k])));
  }
  const double period = 1.0 / crossing_frequency(ref.times, column(ref.values, x1));

  say(o, "generating dataset");
  const Dataset data = pipeline::generate_dataset(dc, o.jobs, o.log);
  const auto dyn = train_model(data, cfg, Direction::Dynamics, o, "dynamics");
  say(o, "evaluating");
  const auto dyn_eval = evaluate_split(dyn, data, "test", dc.horizon, o, "dynamics");

  // Quench and periodic schedules from |0+>, predicted against simulated.
  constexpr int kSchedules = 20;
  auto rng = fields::make_rng(dc.seed, kScheduleStream);
  json schedules = json::object();
  double quench_x1 = 0.0;
  for (const auto family : {pipeline::FieldFamily::Quench, pipeline::FieldFamily::Periodic}) {
    const auto name = pipeline::to_string(family);
    std::vector<double> x1_mse, train_mse, extra_mse;
    for (int i = 0; i < kSchedules; ++i) {
      auto gen = dc.generator;
      gen.family = family;
      const auto f = pipeline::draw_fields(rng, sys, gen, grid);
      const auto sim = pipeline::run_nmr_protocol(sys, f[0], init);
      const auto pred = pipeline::run_nmr_protocol(sys, f[0], init, &dyn.model);
      const int n = rows_within(sim.times, dc.horizon);
      const Eigen::Index rest = sim.values.rows() - n;
      x1_mse.push_back(mse(sim.values.col(x1).head(n), pred.values.col(x1).head(n)));
      train_mse.push_back(mse(sim.values.topRows(n), pred.values.topRows(n)));
      extra_mse.push_back(mse(sim.values.bottomRows(rest), pred.values.bottomRows(rest)));
      if (i == 0) write_series_pair(o.output / (name + "_schedule.csv"), f, {"B"}, sim, "simulated", pred, "predicted");
    }
    if (family == pipeline::FieldFamily::Quench) quench_x1 = mean(x1_mse);
    schedules[name] = {{"schedules", kSchedules},
                       {"X1_train_window_mse", mean(x1_mse)},
                       {"train_window_mse", mean(train_mse)},
                       {"extrapolation_mse", mean(extra_mse)}};
  }

  add(rep, "conditional_phase_max_error", phase_err, "<", 1e-8);
  add(rep, "quench_X1_train_window_mse", quench_x1, "<", 1e-2);
  add(rep, "dynamics_extrapolation_over_train", dyn_eval.extrapolation_mse / dyn_eval.train_window_mse, ">=", 1.0);

  rep.summary = {{"manifest_hash", data.manifest.content_hash},
                 {"records", data.manifest.record_count},
                 {"simulator", {{"X1_period", period}, {"expected_period", 2.0 / sys.coupling},
                                {"conditional_phase_max_error", phase_err}}},
                 {"dynamics", {{"training", training_summary(dyn, o.output / "dynamics_model.json")},
                               {"test", eval_summary(dyn_eval)}}},
                 {"protocol", schedules}};
  return rep;
}

ReproReport fig4cde(const ReproOptions& o) {
  ReproReport rep;
  const auto& cfg = o.config;
  const auto& dc = cfg.dataset;
  const auto& sys = dc.system;
  const auto init = sys.fixed_state;

  // SWAP frequency at zero detuning on a fine grid, five periods.
  pipeline::SystemConfig fine = sys;
  fine.dt = 1e-4;
  fine.observables = {"Z1"};
  const auto fine_grid = fields::UniformGrid::from_horizon(fine.dt, 0.2);
  const auto zero_fine = fields::DrivingField::constant(0.0, fine_grid);
  const auto swap = pipeline::simulate(fine, {zero_fine, zero_fine}, init);
  const double f_swap = crossing_frequency(swap.times, column(swap.values, 0));
  write_columns(o.output / "swap_oscillation.csv", {"t", "Z1"}, {swap.times, column(swap.values, 0)});

  say(o, "generating dataset");
  const Dataset data = pipeline::generate_dataset(dc, o.jobs, o.log);
  const auto ham = train_model(data, cfg, Direction::Hamiltonian, o, "hamiltonian");
  say(o, "evaluating");
  const auto ham_eval = evaluate_split(ham, data, "test", dc.horizon, o, "hamiltonian");

  const auto grid = fields::UniformGrid::from_horizon(sys.dt, dc.horizon);
  auto infer_constant = [&](double d1, double d2) {
    const std::vector<fields::DrivingField> f{fields::DrivingField::constant(d1, grid),
                                             fields::DrivingField::constant(d2, grid)};
    const auto obs = pipeline::simulate(sys, f, init);
    return std::pair{obs, pipeline::infer_detuning(ham.model, sys, obs, init)};
  };

  const auto [zero_obs, zero] = infer_constant(0.0, 0.0);
  double mean_abs = 0.0;
  for (std::size_t k = 0; k < zero.delta1.values().size(); ++k) {
    mean_abs += std::abs(zero.delta1.values()[k]) + std::abs(zero.delta2.values()[k]);
  }
  mean_abs /= 2.0 * static_cast<double>(zero.delta1.values().size());

  const auto [obs, det] = infer_constant(1.0, -1.0);
  const auto z1 = static_cast<Eigen::Index>(obs.observables.index_of("Z1"));
  const double z1_mse = z1 >= 0 ? mse(obs.values.col(z1), det.resimulated.values.col(z1)) : NAN;
  write_series_pair(o.output / "detuning_inference.csv", {det.delta1, det.delta2}, {"Delta1", "Delta2"}, obs,
                    "observed", det.resimulated, "resimulated");

  // Random constant detunings in the span of the training fields.
  constexpr int kSweep = 20;
  auto rng = fields::make_rng(dc.seed, kDetuningStream);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> sweep;
  for (int i = 0; i < kSweep; ++i) {
    const double a = u(rng);
    const double b = u(rng);
    sweep.push_back(infer_constant(a, b).second.closed_loop_mse);
  }

  add(rep, "swap_frequency_relative_error", std::abs(f_swap / (2.0 * sys.coupling) - 1.0), "<", 0.01);
  add(rep, "zero_detuning_mean_abs_over_B0", mean_abs / sys.coupling, "<", 0.05);
  add(rep, "constant_detuning_closed_loop_mse", det.closed_loop_mse, "<", 1e-2);
  add(rep, "constant_detuning_Z1_mse", z1_mse, "<", 1e-2);
  add(rep, "random_constant_detuning_mean_closed_loop_mse", mean(sweep), "<", 1e-2);

  rep.summary = {{"manifest_hash", data.manifest.content_hash},
                 {"records", data.manifest.record_count},
                 {"swap_frequency", {{"measured", f_swap}, {"expected", 2.0 * sys.coupling}}},
                 {"hamiltonian", {{"training", training_summary(ham, o.output / "hamiltonian_model.json")},
                                  {"test", eval_summary(ham_eval)}}},
                 {"zero_detuning", {{"mean_abs_delta", mean_abs}, {"closed_loop_mse", zero.closed_loop_mse}}},
                 {"constant_detuning", {{"delta1", 1.0}, {"delta2", -1.0},
                                        {"closed_loop_mse", det.closed_loop_mse}, {"Z1_mse", nullable(z1_mse)}}},
                 {"random_constant_detunings", {{"instances", kSweep}, {"mean_closed_loop_mse", mean(sweep)}}}};
  return rep;
}

ReproReport figs4(const ReproOptions& o) {
  ReproReport rep;
  const auto& cfg = o.config;
  DatasetConfig noisy = cfg.dataset;
  noisy.system.noise.enabled = true;
  DatasetConfig clean = noisy;
  clean.system.noise.enabled = false;

  say(o, "generating Lindblad dataset");
  const Dataset noisy_data = pipeline::generate_dataset(noisy, o.jobs, o.log);
  say(o, "generating noiseless dataset");
  const Dataset clean_data = pipeline::generate_dataset(clean, o.jobs, o.log);
  const auto with_noise = train_model(noisy_data, cfg, Direction::Dynamics, o, "noise");
  const auto without = train_model(clean_data, cfg, Direction::Dynamics, o, "noiseless");

  say(o, "evaluating on Lindblad test data");
  const auto e_noise = evaluate_split(with_noise, noisy_data, "test", noisy.horizon, o, "noise");
  const auto e_clean = evaluate_split(without, noisy_data, "test", noisy.horizon, o, "noiseless");
  auto overall = [](const EvalReport& e) { return e.mse_vs_time.size() ? e.mse_vs_time.mean() : NAN; };
  const double m_noise = overall(e_noise);
  const double m_clean = overall(e_clean);

  {
    const auto& r = *noisy_data.split("test").front();
    const auto& sys = noisy.system;
    const auto o0 = pipeline::encoder_input(r.initial_state, sys.initial_states);
    const auto a = pipeline::predict_dynamics(with_noise.model, r.fields, o0, sys.observable_set());
    const auto b = pipeline::predict_dynamics(without.model, r.fields, o0, sys.observable_set());
    const auto z0 = static_cast<Eigen::Index>(sys.observable_set().index_of("Z0"));
    write_columns(o.output / "example_Z0.csv", {"t", "B", "lindblad", "prediction_noise", "prediction_0noise"},
                  {r.observables.times, r.fields[0].values(), column(r.observables.values, z0),
                   column(a.values, z0), column(b.values, z0)});
  }

  add(rep, "test_instances", e_noise.instances, ">=", 50);
  add(rep, "noise_over_noiseless_mse", m_noise / m_clean, "<", 1.0);

  rep.summary = {{"manifest_hash_noise", noisy_data.manifest.content_hash},
                 {"manifest_hash_noiseless", clean_data.manifest.content_hash},
                 {"gamma", noisy.system.noise.gamma},
                 {"n_qubits", noisy.system.n_qubits},
                 {"prediction_noise", {{"training", training_summary(with_noise, o.output / "noise_model.json")},
                                       {"test", eval_summary(e_noise)},
                                       {"aggregate_mse", m_noise}}},
                 {"prediction_0noise", {{"training", training_summary(without, o.output / "noiseless_model.json")},
                                        {"test", eval_summary(e_clean)},
                                        {"aggregate_mse", m_clean}}},
                 {"noise_model_better", m_noise < m_clean}};
  return rep;
}

}  // namespace

bool ReproReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string ReproReport::failures() const {
  std::string s;
  for (const auto& c : checks) {
    if (c.passed) continue;
    if (!s.empty()) s += ", ";
    s += c.id;
  }
  return s;
}

const std::vector<std::string>& repro_figures() {
  static const std::vector<std::string> ids{"fig3", "fig4ab", "fig4cde", "figS4"};
  return ids;
}

RunConfig repro_defaults(const std::string& figure) {
  if (figure == "fig3") return pipeline::parse_run_config(json::object());
  if (figure == "fig4ab") {
    return pipeline::parse_run_config({{"system", {{"kind", "nmr_zz"}}}, {"training", {{"epochs", 50}}}});
  }
  if (figure == "fig4cde") return pipeline::parse_run_config({{"system", {{"kind", "sc_swap_detuned"}}}});
  if (figure == "figS4") {
    return pipeline::parse_run_config(
        {{"system", {{"kind", "tfim_ring"}, {"n_qubits", 3}, {"noise", {{"enabled", true}, {"gamma", 0.05}}}}},
         {"dataset", {{"train", 1000}, {"validation", 100}, {"test", 100}}}});
  }
  throw std::invalid_argument("unknown figure '" + figure + "'");
}

ReproReport run_repro(const std::string& figure, const ReproOptions& options) {
  fs::create_directories(options.output);
  {
    std::ofstream f(options.output / "config.json");
    f << json(options.config).dump(2) << '\n';
  }
  ReproReport rep;
  if (figure == "fig3") rep = fig3(options);
  else if (figure == "fig4ab") rep = fig4ab(options);
  else if (figure == "fig4cde") rep = fig4cde(options);
  else if (figure == "figS4") rep = figs4(options);
  else throw std::invalid_argument("unknown figure '" + figure + "'");
  rep.figure = figure;

  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"id", c.id}, {"value", nullable(c.value)}, {"relation", c.relation},
                      {"threshold", c.threshold}, {"passed", c.passed}});
  }
  json summary = {{"figure", figure}, {"seed", options.config.seed}};
  summary.update(rep.summary);
  summary["checks"] = checks;
  summary["passed"] = rep.passed();
  rep.summary = summary;
  std::ofstream f(options.output / "summary.json");
  f << rep.summary.dump(2) << '\n';
  return rep;
}

double crossing_frequency(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> at;
  for (std::size_t k = 1; k < y.size(); ++k) {
    if ((y[k - 1] < 0.0) != (y[k] < 0.0)) {
      const double frac = y[k - 1] / (y[k - 1] - y[k]);
      at.push_back(t[k - 1] + frac * (t[k] - t[k - 1]));
    }
  }
  if (at.size() < 2) return NAN;
  return 0.5 * static_cast<double>(at.size() - 1) / (at.back() - at.front());
}

void write_columns(const fs::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw std::invalid_argument("write_columns: header and column counts differ");
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t j = 0; j < header.size(); ++j) std::fprintf(f, "%s%s", j ? "," : "", header[j].c_str());
  std::fputc('\n', f);
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) std::fprintf(f, "%s%.17g", j ? "," : "", columns[j].at(i));
    std::fputc('\n', f);
  }
  std::fclose(f);
}

}  // namespace hamflow::cli
