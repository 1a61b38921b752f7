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


// Acceptance run: one PASS/FAIL line per criterion. Criteria 1-6 call the
// oracle suites in process; 7-11 drive the hamflow binary end to end.
// Usage: acceptance [criterion ...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hamflow/cli/selftest.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct Repro {
  json summary;
  double seconds = 0.0;
  bool ran = false;
  int status = -1;
  std::string raw;
};

Repro repro(const std::string& figure, const fs::path& out, bool deterministic) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string cmd = "unset HAMFLOW_SEED; '" HAMFLOW_BIN "' repro " + figure +
                          (deterministic ? " --deterministic" : "") + " --out '" + out.string() + "' > '" +
                          (out.string() + ".log") + "' 2>&1";
  std::fflush(stdout);
  const int status = std::system(cmd.c_str());
  Repro r;
  r.status = status;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto path = out / "summary.json";
  if (fs::exists(path)) {
    r.raw = slurp(path);
    r.summary = json::parse(r.raw, nullptr, false);
    r.ran = !r.summary.is_discarded();
  }
  return r;
}

/// All named checks present and passing; detail lists value relation threshold.
Outcome gate(const Repro& r, const std::vector<std::string>& ids) {
  if (!r.ran) return {false, "repro produced no summary (status " + std::to_string(r.status) + ")"};
  std::map<std::string, json> by_id;
  for (const auto& c : r.summary.at("checks")) by_id[c.at("id").get<std::string>()] = c;
  Outcome o{true, ""};
  for (const auto& id : ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      o.passed = false;
      o.detail += id + " missing; ";
      continue;
    }
    const auto& c = it->second;
    char buf[256];
    const std::string value = c.at("value").is_null() ? "nan" : ([&] {
      char v[32];
      std::snprintf(v, sizeof v, "%.3g", c.at("value").get<double>());
      return std::string(v);
    })();
    std::snprintf(buf, sizeof buf, "%s %s %s %.3g%s; ", id.c_str(), value.c_str(),
                  c.at("relation").get<std::string>().c_str(), c.at("threshold").get<double>(),
                  c.at("passed").get<bool>() ? "" : " (fail)");
    o.detail += buf;
    o.passed = o.passed && c.at("passed").get<bool>();
  }
  return o;
}

void report(int criterion, const std::string& name, const Outcome& o) {
  std::printf("%s [%d] %s: %s\n", o.passed ? "PASS" : "FAIL", criterion, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto want = [&](int c) { return wanted.empty() || wanted.count(c); };

  const auto work = fs::temp_directory_path() / "hamflow_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  bool all = true;
  auto record = [&](int c, const std::string& name, const Outcome& o) {
    all = all && o.passed;
    report(c, name, o);
  };

  // Runtime ceilings in seconds.
  const std::map<int, double> limit = {{1, 120}, {2, 60}, {3, 60}, {4, 120}, {5, 120}, {6, 60}};
  for (int c = 1; c <= 6; ++c) {
    if (!want(c)) continue;
    const auto res = hamflow::cli::run_oracle_suite({c}).front();
    char t[64];
    std::snprintf(t, sizeof t, " [%.1fs, limit %.0fs]", res.seconds, limit.at(c));
    record(c, res.name, {res.passed && res.seconds < limit.at(c), res.detail + t});
  }

  Repro a;
  if (want(7) || want(8) || want(11)) {
    a = repro("fig3", work / "fig3_a", true);
    if (want(7)) {
      auto o = gate(a, {"dynamics_train_window_mse", "dynamics_extrapolation_mse", "dynamics_extrapolation_over_train"});
      char t[64];
      std::snprintf(t, sizeof t, "runtime %.0fs < 7200s", a.seconds);
      o.detail += t;
      o.passed = o.passed && a.seconds < 7200.0;
      record(7, "TFIM dynamics at desk scale", o);
    }
    if (want(8)) {
      record(8, "closed-loop quench and periodic field recovery",
             gate(a, {"field_quench_rescaled_mse", "field_periodic_rescaled_mse"}));
    }
  }

  if (want(9)) {
    const auto r = repro("fig4cde", work / "fig4cde", false);
    record(9, "superconducting detuning inference",
           gate(r, {"constant_detuning_closed_loop_mse", "random_constant_detuning_mean_closed_loop_mse",
                    "zero_detuning_mean_abs_over_B0"}));
  }

  if (want(10)) {
    const auto r = repro("figS4", work / "figS4", false);
    record(10, "noise-trained model beats noiseless on Lindblad data",
           gate(r, {"test_instances", "noise_over_noiseless_mse"}));
  }

  if (want(11)) {
    const auto b = repro("fig3", work / "fig3_b", true);
    const bool same = a.ran && b.ran && a.raw == b.raw;
    record(11, "deterministic fig3 summary",
           {same, same ? "summary.json byte-identical (" + std::to_string(a.raw.size()) + " bytes)"
                       : "summary.json differs or missing"});
  }

  std::printf("%s\n", all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL");
  return all ? 0 : 1;
}
