// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
//
// rrdps: RRDPS QKD simulator and security-analysis CLI.
// Exit codes: 0 success, 2 configuration error, 3 infeasible security
// parameters.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "rrdps/errors.hpp"
#include "rrdps/phaselock.hpp"
#include "rrdps/session.hpp"
#include "rrdps/wire.hpp"

namespace {

using rrdps::session::RunConfig;

struct ConfigCli {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> entries;
  bool seed_given = false;
  bool mode_given = false;
};

// One CLI flag per RunConfig field, kebab-case, same keys as the config
// file. Values are applied in command-line order on top of the file.
void add_config_options(CLI::App* cmd, ConfigCli& cli) {
  static const std::pair<const char*, const char*> kKeys[] = {
      {"train-length", "pulses per train L (2..128)"},
      {"mean-photons", "mean photon number per train (nu)"},
      {"mu", "alias of --mean-photons"},
      {"total-loss-db", "end-to-end loss incl. detection"},
      {"excess-loss-db", "extra unitemized loss (fit to observed gain)"},
      {"detection-efficiency", "detector efficiency (default 1: loss is total)"},
      {"dark-rate-cps", "dark counts per second per detector"},
      {"visibility", "interference contrast, scalar"},
      {"visibility-table", "per-delay 'd V [offset]' file"},
      {"phase-offset-rad", "static interferometer phase offset"},
      {"round-rate-hz", "train repetition rate"},
      {"locking-window-ms", "calibration window per second"},
      {"qkd-window-ms", "key-generation window per second"},
      {"settle-us", "delay-gate settle time before each trigger"},
      {"total-rounds", "number of trains to send"},
      {"duration-s", "session length (alternative to --total-rounds)"},
      {"seed", "RNG seed (required for montecarlo)"},
      {"mode", "analytic | montecarlo | paper-repro"},
      {"gain", "fixed Q instead of deriving it from the channel"},
      {"bit-error", "fixed e_bit instead of deriving it"},
      {"sifted-count", "derive Q as sifted/rounds"},
      {"phase-lock", "run calibration windows (montecarlo)"},
      {"drift-sigma", "phase random walk, rad/sqrt(s) at full delay"},
      {"drift-rate", "deterministic phase drift, rad/s at full delay"},
      {"drift-initial-spread", "initial phases uniform in [0, x) rad"},
      {"lockin-flux-cps", "calibration light flux"},
      {"lockin-efficiency", "calibration detection efficiency"},
      {"lockin-visibility", "calibration fringe contrast"},
      {"threads", "worker threads for montecarlo rounds"},
  };
  cmd->add_option("--config", cli.config_path,
                  "key=value config file; flags override it");
  for (const auto& [key, help] : kKeys) {
    const std::string name = std::string("--") + key;
    cmd->add_option_function<std::string>(
        name,
        [&cli, key = std::string(key)](const std::string& value) {
          cli.entries.emplace_back(key, value);
          if (key == "seed") cli.seed_given = true;
          if (key == "mode") cli.mode_given = true;
        },
        help);
  }
}

RunConfig build_config(const ConfigCli& cli) {
  RunConfig config;
  if (!cli.config_path.empty()) {
    config = rrdps::session::load_config_file(cli.config_path);
  }
  for (const auto& [key, value] : cli.entries) {
    rrdps::session::apply_config_entry(config, key, value);
  }
  return config;
}

void write_file(const std::string& path,
                const std::function<void(std::ostream&)>& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  writer(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_report(const rrdps::session::SessionReport& report,
                 const std::string& out_path,
                 const std::string& delay_table_path) {
  rrdps::session::write_summary(report, std::cout);
  if (!out_path.empty()) {
    write_file(out_path, [&](std::ostream& out) {
      rrdps::session::write_summary(report, out);
    });
  }
  if (!delay_table_path.empty()) {
    write_file(delay_table_path, [&](std::ostream& out) {
      rrdps::session::write_delay_table(report, out);
    });
  }
}

int cmd_analytic(const ConfigCli& cli, const std::string& out_path,
                 const std::string& delay_table_path) {
  RunConfig config = build_config(cli);
  const auto report = rrdps::session::run_analytic(config);
  emit_report(report, out_path, delay_table_path);
  return 0;
}

int cmd_montecarlo(const ConfigCli& cli, const std::string& out_path,
                   const std::string& delay_table_path,
                   const std::string& dump_sifted_path,
                   const std::string& dump_clicks_path) {
  RunConfig config = build_config(cli);
  if (cli.mode_given && config.mode != rrdps::session::RunMode::kMonteCarlo) {
    throw rrdps::ConfigError("the montecarlo subcommand runs montecarlo mode");
  }
  config.mode = rrdps::session::RunMode::kMonteCarlo;
  if (!cli.seed_given) {
    throw rrdps::ConfigError("montecarlo mode requires an explicit --seed");
  }
  rrdps::session::MonteCarloDumps dumps;
  dumps.keep_clicks = !dump_clicks_path.empty();
  const bool want_dumps = !dump_sifted_path.empty() || dumps.keep_clicks;
  const auto report = rrdps::session::run_montecarlo(
      config, want_dumps ? &dumps : nullptr);
  emit_report(report, out_path, delay_table_path);
  if (!dump_sifted_path.empty()) {
    write_file(dump_sifted_path, [&](std::ostream& out) {
      std::vector<std::uint8_t> buf;
      for (const auto& rec : dumps.sifted) rrdps::wire::encode(rec, buf);
      out.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size()));
    });
  }
  if (!dump_clicks_path.empty()) {
    write_file(dump_clicks_path, [&](std::ostream& out) {
      std::vector<std::uint8_t> buf;
      for (const auto& rec : dumps.clicks) rrdps::wire::encode(rec, buf);
      out.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size()));
    });
  }
  return 0;
}

int cmd_calibrate_demo(const ConfigCli& cli, int seconds,
                       const std::string& export_path) {
  RunConfig config = build_config(cli);
  config.validate();
  if (seconds < 1) throw rrdps::ConfigError("--seconds must be >= 1");
  const auto plan = rrdps::session::schedule(config);

  rrdps::phaselock::DriftModel drift = config.drift;
  drift.num_delays = config.train_length;
  rrdps::phaselock::PhaseTruth truth(drift, rrdps::rng::derive_seed(
                                                config.seed, 0xCA1D30));
  rrdps::phaselock::CalibrationTable table(config.train_length);
  rrdps::phaselock::CalibrationSettings settings;
  settings.window_budget_s = plan.locking_window_s;
  rrdps::rng::Engine engine(rrdps::rng::derive_seed(config.seed, 0xCA1D31));

  std::printf("second,updated,stale,max_residual_rad,min_visibility\n");
  for (int s = 0; s < seconds; ++s) {
    truth.advance(plan.locking_window_s);
    const auto outcome = rrdps::phaselock::calibrate_all(
        table, truth, config.lockin, settings, engine);
    truth.advance(plan.qkd_window_s);
    double max_residual = 0.0;
    double min_visibility = 1.0;
    for (int d = 1; d < config.train_length; ++d) {
      max_residual = std::max(max_residual, table.entry(d).residual);
      min_visibility = std::min(
          min_visibility,
          rrdps::phaselock::compensated_visibility(
              config.visibility, truth.phase(d), table.compensation(d)));
    }
    std::printf("%d,%d,%d,%.4f,%.4f\n", s + 1, outcome.updated, outcome.stale,
                max_residual, min_visibility);
  }
  if (!export_path.empty()) {
    write_file(export_path,
               [&](std::ostream& out) { table.export_text(out); });
  }
  return 0;
}

int cmd_sweep(const ConfigCli& cli, const std::string& param, double from,
              double to, int steps, const std::string& out_path) {
  if (steps < 1) throw rrdps::ConfigError("--steps must be >= 1");
  static const char* kSweepable[] = {
      "mean-photons", "mu",        "train-length",  "total-loss-db",
      "excess-loss-db", "dark-rate-cps", "visibility", "gain",
      "bit-error",    "phase-offset-rad"};
  bool known = false;
  for (const char* k : kSweepable) known = known || param == k;
  if (!known) throw rrdps::ConfigError("cannot sweep parameter: " + param);

  std::string csv = "param,value,gain,bit_error,threshold_photons,pa_cost,"
                    "rate_per_round,final_key_bits,rate_bps,insecure\n";
  for (int i = 0; i < steps; ++i) {
    const double value =
        steps == 1 ? from : from + (to - from) * i / (steps - 1);
    RunConfig config = build_config(cli);
    char value_text[40];
    if (param == "train-length") {
      std::snprintf(value_text, sizeof(value_text), "%lld",
                    static_cast<long long>(std::llround(value)));
    } else {
      std::snprintf(value_text, sizeof(value_text), "%.17g", value);
    }
    rrdps::session::apply_config_entry(config, param, value_text);
    char row[256];
    try {
      const auto report = rrdps::session::run_analytic(config);
      std::snprintf(row, sizeof(row), "%s,%s,%.6g,%.6g,%d,%.6g,%.6g,%llu,%.6g,%d\n",
                    param.c_str(), value_text, report.gain, report.bit_error,
                    report.threshold_photons, report.pa_cost,
                    report.rate_per_round,
                    static_cast<unsigned long long>(report.final_key_bits),
                    report.rate_bps, report.insecure ? 1 : 0);
    } catch (const rrdps::InfeasibleSecurityError&) {
      // Sweeps keep going so the table shows where the protocol dies.
      std::snprintf(row, sizeof(row), "%s,%s,nan,nan,0,nan,nan,0,nan,1\n",
                    param.c_str(), value_text);
    }
    csv += row;
  }
  std::fputs(csv.c_str(), stdout);
  if (!out_path.empty()) {
    write_file(out_path, [&](std::ostream& out) { out << csv; });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RRDPS QKD simulator and security analysis"};
  app.require_subcommand(1);

  ConfigCli analytic_cli, montecarlo_cli, calibrate_cli, sweep_cli;
  std::string out_path, delay_table_path;
  std::string mc_out, mc_delay_table, dump_sifted, dump_clicks;
  std::string export_path;
  int seconds = 5;
  std::string sweep_param, sweep_out;
  double sweep_from = 0.0, sweep_to = 0.0;
  int sweep_steps = 1;

  auto* analytic =
      app.add_subcommand("analytic", "evaluate the key-rate bounds, no sampling");
  add_config_options(analytic, analytic_cli);
  analytic->add_option("--out", out_path, "write the summary to a file too");
  analytic->add_option("--delay-table", delay_table_path,
                       "write the per-delay table (CSV)");

  auto* montecarlo =
      app.add_subcommand("montecarlo", "simulate the full pipeline per round");
  add_config_options(montecarlo, montecarlo_cli);
  montecarlo->add_option("--out", mc_out, "write the summary to a file too");
  montecarlo->add_option("--delay-table", mc_delay_table,
                         "write the per-delay table (CSV)");
  montecarlo->add_option("--dump-sifted", dump_sifted,
                         "binary sifted-record dump (length-prefixed)");
  montecarlo->add_option("--dump-clicks", dump_clicks,
                         "binary click-record dump (length-prefixed)");

  auto* calibrate = app.add_subcommand(
      "calibrate-demo", "run calibration passes against simulated drift");
  add_config_options(calibrate, calibrate_cli);
  calibrate->add_option("--seconds", seconds, "simulated seconds to run");
  calibrate->add_option("--export", export_path,
                        "write the calibration table (text)");

  auto* sweep = app.add_subcommand(
      "sweep", "vary one parameter over a range, emit a CSV table");
  add_config_options(sweep, sweep_cli);
  sweep->add_option("--param", sweep_param, "parameter to vary")->required();
  sweep->add_option("--from", sweep_from, "first value")->required();
  sweep->add_option("--to", sweep_to, "last value")->required();
  sweep->add_option("--steps", sweep_steps, "number of points")->required();
  sweep->add_option("--out", sweep_out, "write the CSV to a file too");

  try {
    app.parse(argc, argv);
    if (*analytic) return cmd_analytic(analytic_cli, out_path, delay_table_path);
    if (*montecarlo) {
      return cmd_montecarlo(montecarlo_cli, mc_out, mc_delay_table,
                            dump_sifted, dump_clicks);
    }
    if (*calibrate) return cmd_calibrate_demo(calibrate_cli, seconds, export_path);
    if (*sweep) {
      return cmd_sweep(sweep_cli, sweep_param, sweep_from, sweep_to,
                       sweep_steps, sweep_out);
    }
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const rrdps::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const rrdps::InfeasibleSecurityError& e) {
    std::cerr << "infeasible security parameters: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
