// Copyright 2026 The adhoc Authors
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

#include "adhoc/cli.hpp"

#include "adhoc/config.hpp"
#include "adhoc/parallel.hpp"
#include "adhoc/random.hpp"
#include "adhoc/scenarios.hpp"
#include "adhoc/systems.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#ifndef ADHOC_VERSION
#define ADHOC_VERSION "0.0.0"
#endif

namespace adhoc {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> workers;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "JSON config file");
  app->add_option("-s,--seed", c.seed, "master seed (overrides config)");
  app->add_option("-o,--out", c.out, "output directory");
  app->add_option("-w,--workers", c.workers, "worker threads, 0 = all cores");
}

RunConfig load(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : parse_config_file(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.workers) cfg.workers = *c.workers;
  if (!c.out.empty()) cfg.output_dir = c.out;
  return cfg;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path output_dir(const RunConfig& cfg, const std::string& name) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  const char* root = std::getenv(kOutRootEnv);
  const fs::path base = (root && *root) ? fs::path(root) : fs::path("runs");
  return base / (name + "-seed" + std::to_string(cfg.seed));
}

/// Writes the four standard files and reports the directory.
void emit(const RunConfig& cfg, const std::string& command, const Json& records,
          const CsvTable& plot, std::ostream& out) {
  const fs::path dir = output_dir(cfg, command);
  RunConfig echo = cfg;
  echo.output_dir = dir.string();
  write_text_file((dir / RunFiles::config).string(), serialize_config(echo));
  write_text_file((dir / RunFiles::records).string(), records.dump(2) + "\n");
  write_text_file((dir / RunFiles::plot).string(), plot.str());
  Json manifest = {{"command", command},
                   {"scenario", cfg.scenario},
                   {"seed", cfg.seed},
                   {"version", ADHOC_VERSION},
                   {"timestamp", utc_timestamp()},
                   {"workers", worker_count()},
                   {"files", {RunFiles::config, RunFiles::records, RunFiles::plot}}};
  write_text_file((dir / RunFiles::manifest).string(), manifest.dump(2) + "\n");
  out << "wrote " << dir.string() << "\n";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ControlSet load_pulse(const std::string& path, const RunConfig& cfg) {
  const ControlSet p = controls_from_csv(slurp(path), cfg.cz.total_time_ns);
  if (!(p.grid() == cz_grid(cfg)) || p.channels() != 2)
    throw ValidationError("pulse '" + path + "' does not match the cz grid in the config");
  return p;
}

int cmd_optimize_open(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const CzDesign d = design_cz_pulse(cfg, cfg.grape.infidelity_goal);
  Json rec = {{"command", "optimize-open"},
              {"seed", cfg.seed},
              {"result", to_json(d.result)},
              {"pulse", to_json(d.result.controls)}};
  CsvTable plot({"iteration", "infidelity"});
  for (std::size_t i = 0; i < d.result.infidelity_history.size(); ++i)
    plot.add_row({static_cast<long long>(i), d.result.infidelity_history[i]});
  emit(cfg, "optimize-open", rec, plot, out);
  write_text_file((output_dir(cfg, "optimize-open") / "pulse.csv").string(),
                  controls_to_csv(d.result.controls));
  out << "final infidelity " << format_number(d.result.final_infidelity) << " ("
      << d.result.stop_reason << ")\n";
  return 0;
}

int cmd_calibrate(const RunConfig& cfg, const std::string& pulse_path, std::ostream& out) {
  cfg.validate();
  const ControlSet start = pulse_path.empty()
                               ? design_cz_pulse(cfg, cfg.grape.infidelity_goal).result.controls
                               : load_pulse(pulse_path, cfg);
  const SystemRealization real = realize(nominal_spec(cfg), derive_seed(cfg.seed, {0x20, 0}));
  const Estimator est = estimator(cfg.estimator);
  const CalibrationResult r =
      calibrate_realization(cfg, real, start, est, cfg.adhoc_recovery.nm, derive_seed(cfg.seed, {0x21}));
  const ControlSet best = ControlSet::unflatten(start.grid(), 2, r.best);
  Json rec = {{"command", "calibrate"},
              {"seed", cfg.seed},
              {"estimator", cfg.estimator.kind},
              {"result", to_json(r)},
              {"pulse", to_json(best)}};
  emit(cfg, "calibrate", rec, history_table(r), out);
  write_text_file((output_dir(cfg, "calibrate") / "pulse.csv").string(), controls_to_csv(best));
  out << "best fidelity " << format_number(r.best_fidelity) << " after " << r.eval_count
      << " evaluations (" << to_string(r.halt_reason) << ")\n";
  return 0;
}

int cmd_scan(const RunConfig& cfg, const std::string& param, double lo, double hi, int points,
             const std::string& pulse_path, std::ostream& out) {
  cfg.validate();
  if (points < 1) throw ValidationError("scan: --points must be >= 1");
  const ControlSet pulse = pulse_path.empty()
                               ? design_cz_pulse(cfg, cfg.grape.infidelity_goal).result.controls
                               : load_pulse(pulse_path, cfg);
  std::vector<double> values;
  for (int i = 0; i < points; ++i)
    values.push_back(points == 1 ? lo : lo + (hi - lo) * i / (points - 1));
  const ScenarioRecord rec = run_scan(cfg, pulse, param, values);
  emit(cfg, "scan-" + param, rec.to_json(), rec.plot, out);
  return 0;
}

int cmd_scenario(RunConfig cfg, const std::string& id, std::ostream& out) {
  cfg.scenario = id;
  const ScenarioRecord rec = run_scenario(cfg);
  emit(cfg, id, rec.to_json(), rec.plot, out);
  out << rec.summary.dump() << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"adhoc: pulse design and closed-loop calibration", "adhoc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ADHOC_VERSION);

  Common opt, cal, scn, sce;
  auto* c_opt = app.add_subcommand("optimize-open", "GRAPE design of the CZ pulse on the nominal model");
  add_common(c_opt, opt);

  std::string cal_pulse;
  auto* c_cal = app.add_subcommand("calibrate", "closed-loop calibration on one seeded realization");
  add_common(c_cal, cal);
  c_cal->add_option("-p,--pulse", cal_pulse, "starting pulse CSV (default: GRAPE design)");

  std::string scan_param = "g1", scan_pulse;
  double scan_lo = -0.1, scan_hi = 0.1;
  int scan_points = 21;
  auto* c_scan = app.add_subcommand("scan", "fidelity of a pulse while one system parameter is swept");
  add_common(c_scan, scn);
  c_scan->add_option("--param", scan_param, "g1|g2|delta1|delta2|offset|sigma_filt")->capture_default_str();
  c_scan->add_option("--min", scan_lo)->capture_default_str();
  c_scan->add_option("--max", scan_hi)->capture_default_str();
  c_scan->add_option("--points", scan_points)->capture_default_str();
  c_scan->add_option("-p,--pulse", scan_pulse, "pulse CSV (default: GRAPE design)");

  std::string scenario_id;
  auto* c_sce = app.add_subcommand("scenario", "run a named study");
  add_common(c_sce, sce);
  c_sce->add_option("id", scenario_id, "scenario id")->required();

  std::string validate_path;
  auto* c_val = app.add_subcommand("validate-config", "check a config file and print it with defaults");
  c_val->add_option("file", validate_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << ADHOC_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (c_val->parsed()) {
      const RunConfig cfg = parse_config_file(validate_path);
      out << serialize_config(cfg);
      return 0;
    }
    const Common& common = c_opt->parsed() ? opt : c_cal->parsed() ? cal : c_scan->parsed() ? scn : sce;
    const RunConfig cfg = load(common);
    set_worker_count(cfg.workers);
    if (c_opt->parsed()) return cmd_optimize_open(cfg, out);
    if (c_cal->parsed()) return cmd_calibrate(cfg, cal_pulse, out);
    if (c_scan->parsed())
      return cmd_scan(cfg, scan_param, scan_lo, scan_hi, scan_points, scan_pulse, out);
    return cmd_scenario(cfg, scenario_id, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace adhoc
