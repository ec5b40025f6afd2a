// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rrdps/phaselock.hpp"
#include "rrdps/photonics.hpp"
#include "rrdps/protocol.hpp"

namespace rrdps::session {

enum class RunMode { kAnalytic, kMonteCarlo, kPaperRepro };

RunMode parse_mode(std::string_view name);  // throws ConfigError
std::string mode_name(RunMode mode);

/// Full run configuration. Every field maps to one kebab-case config key /
/// CLI flag (see apply_config_entry).
struct RunConfig {
  int train_length = 128;
  double mean_photons = 0.8;
  double total_loss_db = 18.0;
  double excess_loss_db = 0.0;
  double detection_efficiency = 1.0;
  double dark_rate_cps = 0.0;
  double visibility = 0.98;
  std::vector<double> visibility_by_delay;  // optional per-delay override
  std::vector<double> offset_by_delay;      // optional per-delay override
  double phase_offset_rad = 0.0;
  double round_rate_hz = 10000.0;
  double locking_window_ms = 340.0;
  double qkd_window_ms = 660.0;
  double settle_us = 90.0;
  std::uint64_t total_rounds = 0;
  double duration_s = 0.0;  // alternative way to fix the round count
  std::uint64_t seed = 1;
  RunMode mode = RunMode::kAnalytic;
  // Direct observables for paper-repro (and fixed-gain analytic) runs.
  double gain_override = -1.0;
  double bit_error_override = -1.0;
  std::uint64_t sifted_override = 0;
  bool phase_lock = true;
  phaselock::DriftModel drift;
  phaselock::LockinSource lockin;
  int threads = 1;

  void validate() const;  // throws ConfigError
};

/// Derived per-second timing: 340 ms locking, then QKD rounds at the
/// round rate, each trigger preceded by the settle time inside its own
/// round period.
struct SchedulePlan {
  double locking_window_s = 0.0;
  double qkd_window_s = 0.0;
  double round_period_s = 0.0;
  double settle_s = 0.0;
  std::uint64_t rounds_per_second = 0;
  double qkd_busy_s = 0.0;
  double idle_s = 0.0;
};

SchedulePlan schedule(const RunConfig& config);  // throws ConfigError

struct SessionReport {
  std::string schema = "rrdps-report/1";
  std::string mode;
  std::uint64_t seed = 0;
  int train_length = 0;
  double mean_photons = 0.0;
  std::uint64_t rounds_sent = 0;
  std::uint64_t sifted_count = 0;
  double gain = 0.0;
  double bit_error = 0.0;
  int threshold_photons = 0;
  double pa_cost = 0.0;
  double ec_cost = 0.0;
  double rate_per_round = 0.0;
  std::uint64_t final_key_bits = 0;
  double rate_bps = 0.0;
  double duration_s = 0.0;
  bool insecure = false;
  std::vector<std::uint64_t> sifted_by_delay;  // index d; entry 0 unused
  std::vector<std::uint64_t> errors_by_delay;  // index d; entry 0 unused

  bool operator==(const SessionReport&) const = default;
};

/// Optional record capture from a Monte Carlo run, in round order.
struct MonteCarloDumps {
  bool keep_clicks = false;
  std::vector<protocol::SiftedRecord> sifted;
  std::vector<photonics::ClickRecord> clicks;
};

/// Evaluate the security bounds at configured or derived observables;
/// no sampling. Deterministic. Throws InfeasibleSecurityError when the
/// observables violate a bound.
SessionReport run_analytic(const RunConfig& config);

/// Full pipeline: encode, channel, delay choice, interference, click
/// sampling, sifting and ledger bookkeeping per round, with calibration
/// every locking window when phase_lock is on. Byte-identical reports for
/// equal seeds, independent of the thread count.
SessionReport run_montecarlo(const RunConfig& config,
                             MonteCarloDumps* dumps = nullptr);

/// key=value summary, schema-versioned, doubles printed round-trip exact.
void write_summary(const SessionReport& report, std::ostream& out);
std::string summary_string(const SessionReport& report);
SessionReport parse_summary(std::istream& in);

/// Delimited per-delay table: header "d,sifted,errors,e_bit".
void write_delay_table(const SessionReport& report, std::ostream& out);

/// Apply one config-file entry / CLI flag value. Throws ConfigError on an
/// unknown key or an unparsable value.
void apply_config_entry(RunConfig& config, std::string_view key,
                        std::string_view value);

/// Plain-text key=value file, '#' comments, blank lines ignored.
RunConfig load_config_file(const std::string& path);

/// Per-delay "d visibility [offset_rad]" table file.
void load_visibility_table(RunConfig& config, const std::string& path);

}  // namespace rrdps::session
