// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "rrdps/random.hpp"

namespace rrdps::phaselock {

/// Ground-truth interferometer phase drift: a Wiener process plus a linear
/// term (central-wavelength drift), both scaled by delay/128 so longer
/// arms drift faster. Parameters are configuration, not measured claims.
struct DriftModel {
  double sigma_rad_per_sqrt_s = 0.08;
  double rate_rad_per_s = 0.02;
  double initial_spread_rad = 0.0;  ///< initial phases uniform in [0, spread)
  int num_delays = 128;

  double scale(int delay) const {
    return static_cast<double>(delay) / 128.0;
  }
};

/// Simulator-owned phase truth, one phase per delay, evolved on demand.
class PhaseTruth {
 public:
  PhaseTruth(const DriftModel& model, std::uint64_t seed);

  void advance(double dt_s);
  double phase(int delay) const;
  double time_s() const { return time_; }
  const DriftModel& model() const { return model_; }

 private:
  DriftModel model_;
  std::vector<double> phase_;
  double time_ = 0.0;
  rng::Engine engine_;
};

/// Bright calibration light parameters (input flux, detection efficiency,
/// fringe contrast).
struct LockinSource {
  double flux_cps = 60e6;
  double detection_efficiency = 0.1;
  double visibility = 0.98;
};

struct FringeCounts {
  std::uint64_t c1 = 0;
  std::uint64_t c2 = 0;
};

/// One fringe point: Poisson counts at the two detectors with means
/// flux * window * efficiency * (1 +- V cos(true + applied)) / 2.
FringeCounts measure_fringe(double true_phase, double applied_phase,
                            const LockinSource& source, double window_s,
                            rng::Engine& engine);

/// Least-squares misfit S(phi) = sum_k (model_k(phi) - C1_k/(C1_k+C2_k))^2
/// with model_k(phi) = (1 + cos(phi + applied_k)) / 2.
double fit_misfit(std::span<const FringeCounts> counts,
                  std::span<const double> applied_phases, double phase);

/// Phase estimate minimizing the misfit. Starts from the closed-form
/// quadrature solution (exact for equally spaced applied phases) and
/// polishes numerically. Result in [0, 2pi). Throws InsufficientCounts if
/// any step has zero total counts.
double estimate_phase(std::span<const FringeCounts> counts,
                      std::span<const double> applied_phases);

/// Equally spaced applied phases 2k*pi/N for k = 0..steps-1 (steps >= 3).
double estimate_phase(std::span<const FringeCounts> counts, int steps);

/// Grid search around an estimate: evaluates the misfit at
/// estimate + k*step for |k| <= steps and returns the argmin, so the
/// result is never worse than the input.
double refine(std::span<const FringeCounts> counts,
              std::span<const double> applied_phases, double estimate,
              double step_rad = 0.02, int steps = 5);

struct CalibrationEntry {
  double phase = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  double timestamp_s = -1.0;
  bool stale = true;
};

/// Compensation phase per delay. Single-writer (the calibration pass),
/// read by QKD rounds between calibration windows.
class CalibrationTable {
 public:
  explicit CalibrationTable(int num_delays = 128);

  int size() const { return static_cast<int>(entries_.size()); }
  const CalibrationEntry& entry(int delay) const;
  void update(int delay, const CalibrationEntry& entry);
  void mark_stale(int delay);

  /// Phase to subtract during QKD; 0 for a never-calibrated entry.
  double compensation(int delay) const;

  /// One line per delay: d<TAB>phase_rad<TAB>residual<TAB>timestamp.
  void export_text(std::ostream& out) const;
  static CalibrationTable import_text(std::istream& in);

 private:
  std::vector<CalibrationEntry> entries_;
};

struct CalibrationSettings {
  int phase_steps = 4;          ///< N fringe points per delay
  double refine_step_rad = 0.02;
  int refine_steps = 5;
  double window_budget_s = 0.340;  ///< shared by all delays in the table
};

struct CalibrationOutcome {
  int updated = 0;
  int stale = 0;
};

/// Refresh every table entry from fringe measurements against the current
/// truth. An entry whose counts are unusable is flagged stale and keeps
/// its previous value. `flux_scale`, when set, scales the lock-in flux per
/// delay (used to model starved paths).
CalibrationOutcome calibrate_all(
    CalibrationTable& table, const PhaseTruth& truth,
    const LockinSource& source, const CalibrationSettings& settings,
    rng::Engine& engine,
    const std::function<double(int)>& flux_scale = nullptr);

/// Interference contrast left after compensating with phase_hat:
/// instrument_visibility * cos(true_phase - phase_hat).
double compensated_visibility(double instrument_visibility, double true_phase,
                              double phase_hat);

}  // namespace rrdps::phaselock
