// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#include "rrdps/phaselock.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rrdps/errors.hpp"

namespace rrdps::phaselock {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

double wrap_2pi(double x) {
  double w = std::fmod(x, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

std::uint64_t poisson_draw(double mean, rng::Engine& engine) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine);
}

// Golden-section minimum of f on [lo, hi]; f must be unimodal there.
template <typename F>
double golden_min(F&& f, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 90; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> equally_spaced(int steps) {
  if (steps < 3) {
    throw std::domain_error("estimate_phase: need at least 3 phase steps");
  }
  std::vector<double> applied(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    applied[static_cast<std::size_t>(k)] = kTwoPi * k / steps;
  }
  return applied;
}

struct FitQuality {
  double misfit = 0.0;
  double amplitude = 0.0;  // fitted fringe contrast
};

FitQuality fit_quality(std::span<const FringeCounts> counts,
                       std::span<const double> applied, double phase) {
  double a = 0.0, b = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double total =
        static_cast<double>(counts[k].c1 + counts[k].c2);
    const double g = 2.0 * static_cast<double>(counts[k].c1) / total - 1.0;
    a += g * std::cos(applied[k]);
    b += g * std::sin(applied[k]);
  }
  FitQuality q;
  q.misfit = fit_misfit(counts, applied, phase);
  q.amplitude = 2.0 * std::hypot(a, b) / static_cast<double>(counts.size());
  return q;
}

}  // namespace

PhaseTruth::PhaseTruth(const DriftModel& model, std::uint64_t seed)
    : model_(model),
      phase_(static_cast<std::size_t>(model.num_delays), 0.0),
      engine_(seed) {
  if (model.num_delays < 1) {
    throw std::domain_error("DriftModel: num_delays must be >= 1");
  }
  if (model.sigma_rad_per_sqrt_s < 0.0) {
    throw std::domain_error("DriftModel: sigma must be >= 0");
  }
  if (model_.initial_spread_rad > 0.0) {
    for (auto& p : phase_) {
      p = rng::uniform01(engine_) * model_.initial_spread_rad;
    }
  }
}

void PhaseTruth::advance(double dt_s) {
  if (dt_s < 0.0) throw std::domain_error("PhaseTruth: dt must be >= 0");
  if (dt_s == 0.0) return;
  const double sqrt_dt = std::sqrt(dt_s);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int d = 0; d < model_.num_delays; ++d) {
    const double s = model_.scale(d);
    phase_[static_cast<std::size_t>(d)] +=
        model_.rate_rad_per_s * s * dt_s +
        normal(engine_) * model_.sigma_rad_per_sqrt_s * s * sqrt_dt;
  }
  time_ += dt_s;
}

double PhaseTruth::phase(int delay) const {
  if (delay < 0 || delay >= model_.num_delays) {
    throw std::domain_error("PhaseTruth: delay out of range");
  }
  return phase_[static_cast<std::size_t>(delay)];
}

FringeCounts measure_fringe(double true_phase, double applied_phase,
                            const LockinSource& source, double window_s,
                            rng::Engine& engine) {
  if (source.flux_cps < 0.0 || window_s < 0.0) {
    throw std::domain_error("measure_fringe: flux and window must be >= 0");
  }
  const double total =
      source.flux_cps * window_s * source.detection_efficiency;
  double p1 = 0.5 * (1.0 + source.visibility *
                               std::cos(true_phase + applied_phase));
  p1 = std::clamp(p1, 0.0, 1.0);
  FringeCounts counts;
  counts.c1 = poisson_draw(total * p1, engine);
  counts.c2 = poisson_draw(total * (1.0 - p1), engine);
  return counts;
}

double fit_misfit(std::span<const FringeCounts> counts,
                  std::span<const double> applied_phases, double phase) {
  if (counts.size() != applied_phases.size() || counts.size() < 3) {
    throw std::invalid_argument("fit_misfit: need >= 3 matched points");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const std::uint64_t total = counts[k].c1 + counts[k].c2;
    if (total == 0) {
      throw InsufficientCounts("fringe step " + std::to_string(k) +
                               " has zero counts");
    }
    const double frac =
        static_cast<double>(counts[k].c1) / static_cast<double>(total);
    const double model = 0.5 * (1.0 + std::cos(phase + applied_phases[k]));
    const double r = model - frac;
    s += r * r;
  }
  return s;
}

double estimate_phase(std::span<const FringeCounts> counts,
                      std::span<const double> applied_phases) {
  if (counts.size() != applied_phases.size() || counts.size() < 3) {
    throw std::invalid_argument("estimate_phase: need >= 3 matched points");
  }
  double a = 0.0, b = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const std::uint64_t total = counts[k].c1 + counts[k].c2;
    if (total == 0) {
      throw InsufficientCounts("fringe step " + std::to_string(k) +
                               " has zero counts");
    }
    const double g =
        2.0 * static_cast<double>(counts[k].c1) / static_cast<double>(total) -
        1.0;
    a += g * std::cos(applied_phases[k]);
    b += g * std::sin(applied_phases[k]);
  }
  // Closed-form least-squares solution for equally spaced applied phases;
  // the polish below also covers irregular spacing.
  const double start = std::atan2(-b, a);
  auto misfit = [&](double phi) {
    return fit_misfit(counts, applied_phases, phi);
  };
  const double polished = golden_min(misfit, start - 0.4, start + 0.4);
  return wrap_2pi(misfit(polished) <= misfit(start) ? polished : start);
}

double estimate_phase(std::span<const FringeCounts> counts, int steps) {
  const auto applied = equally_spaced(steps);
  return estimate_phase(counts, applied);
}

double refine(std::span<const FringeCounts> counts,
              std::span<const double> applied_phases, double estimate,
              double step_rad, int steps) {
  if (!(step_rad > 0.0)) {
    throw std::domain_error("refine: step must be > 0");
  }
  double best = estimate;
  double best_s = fit_misfit(counts, applied_phases, estimate);
  for (int k = -steps; k <= steps; ++k) {
    if (k == 0) continue;
    const double candidate = estimate + k * step_rad;
    const double s = fit_misfit(counts, applied_phases, candidate);
    if (s < best_s) {
      best_s = s;
      best = candidate;
    }
  }
  return wrap_2pi(best);
}

CalibrationTable::CalibrationTable(int num_delays)
    : entries_(static_cast<std::size_t>(num_delays)) {
  if (num_delays < 1) {
    throw std::domain_error("CalibrationTable: need at least one delay");
  }
}

const CalibrationEntry& CalibrationTable::entry(int delay) const {
  if (delay < 0 || delay >= size()) {
    throw std::domain_error("CalibrationTable: delay out of range");
  }
  return entries_[static_cast<std::size_t>(delay)];
}

void CalibrationTable::update(int delay, const CalibrationEntry& entry) {
  if (delay < 0 || delay >= size()) {
    throw std::domain_error("CalibrationTable: delay out of range");
  }
  entries_[static_cast<std::size_t>(delay)] = entry;
}

void CalibrationTable::mark_stale(int delay) {
  if (delay < 0 || delay >= size()) {
    throw std::domain_error("CalibrationTable: delay out of range");
  }
  entries_[static_cast<std::size_t>(delay)].stale = true;
}

double CalibrationTable::compensation(int delay) const {
  const auto& e = entry(delay);
  return e.timestamp_s < 0.0 ? 0.0 : e.phase;
}

void CalibrationTable::export_text(std::ostream& out) const {
  char line[128];
  for (int d = 0; d < size(); ++d) {
    const auto& e = entries_[static_cast<std::size_t>(d)];
    std::snprintf(line, sizeof(line), "%d\t%.17g\t%.17g\t%.17g\n", d, e.phase,
                  e.residual, e.timestamp_s);
    out << line;
  }
}

CalibrationTable CalibrationTable::import_text(std::istream& in) {
  std::vector<CalibrationEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    int d = 0;
    CalibrationEntry e;
    if (!(fields >> d >> e.phase >> e.residual >> e.timestamp_s)) {
      throw std::runtime_error("CalibrationTable: malformed line: " + line);
    }
    if (d != static_cast<int>(entries.size())) {
      throw std::runtime_error("CalibrationTable: delays must be contiguous");
    }
    e.stale = e.timestamp_s < 0.0;
    entries.push_back(e);
  }
  if (entries.empty()) {
    throw std::runtime_error("CalibrationTable: empty table");
  }
  CalibrationTable table(static_cast<int>(entries.size()));
  for (int d = 0; d < table.size(); ++d) {
    table.entries_[static_cast<std::size_t>(d)] =
        entries[static_cast<std::size_t>(d)];
    table.entries_[static_cast<std::size_t>(d)].stale =
        entries[static_cast<std::size_t>(d)].stale;
  }
  return table;
}

CalibrationOutcome calibrate_all(CalibrationTable& table,
                                 const PhaseTruth& truth,
                                 const LockinSource& source,
                                 const CalibrationSettings& settings,
                                 rng::Engine& engine,
                                 const std::function<double(int)>& flux_scale) {
  if (settings.phase_steps < 3) {
    throw std::domain_error("calibrate_all: need >= 3 phase steps");
  }
  if (table.size() > truth.model().num_delays) {
    throw std::domain_error("calibrate_all: truth covers fewer delays");
  }
  const auto applied = equally_spaced(settings.phase_steps);
  const double per_delay = settings.window_budget_s / table.size();
  const double per_step = per_delay / settings.phase_steps;

  CalibrationOutcome outcome;
  std::vector<FringeCounts> counts(applied.size());
  for (int d = 0; d < table.size(); ++d) {
    LockinSource local = source;
    if (flux_scale) local.flux_cps *= flux_scale(d);
    for (std::size_t k = 0; k < applied.size(); ++k) {
      counts[k] =
          measure_fringe(truth.phase(d), applied[k], local, per_step, engine);
    }
    try {
      // Compensation phase: applying -phi_hat cancels the arm phase, and
      // phi_hat is exactly what the fit recovers for the fringe
      // cos(phi + applied), so the stored value is the arm phase estimate.
      double phi = estimate_phase(counts, applied);
      phi = refine(counts, applied, phi, settings.refine_step_rad,
                   settings.refine_steps);
      const FitQuality q = fit_quality(counts, applied, phi);
      CalibrationEntry entry;
      entry.phase = phi;
      const double amp = std::max(q.amplitude, 0.05);
      entry.residual = std::sqrt(8.0 * q.misfit /
                                 (static_cast<double>(applied.size()) * amp *
                                  amp));
      entry.timestamp_s = truth.time_s();
      entry.stale = false;
      table.update(d, entry);
      ++outcome.updated;
    } catch (const InsufficientCounts&) {
      table.mark_stale(d);
      ++outcome.stale;
    }
  }
  return outcome;
}

double compensated_visibility(double instrument_visibility, double true_phase,
                              double phase_hat) {
  return instrument_visibility * std::cos(true_phase - phase_hat);
}

}  // namespace rrdps::phaselock
