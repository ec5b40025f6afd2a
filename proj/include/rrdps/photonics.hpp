// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rrdps/protocol.hpp"
#include "rrdps/random.hpp"

namespace rrdps::photonics {

/// Weak-coherent pulse train reduced to per-slot mean photon numbers and
/// phases. Exact for these statistics: every transform below maps
/// coherent states to coherent states.
struct OpticalTrain {
  std::vector<double> mean_photons;
  std::vector<double> phase;

  int size() const { return static_cast<int>(mean_photons.size()); }
};

/// Loss and detector parameters of the receiving side. The headline
/// total_loss_db is the end-to-end figure (fibre + receiver + detection);
/// excess_loss_db is a separate knob for unitemized losses that has to be
/// fitted to observed gain, never asserted. detection_efficiency defaults
/// to 1 so a total-loss figure is not double counted.
struct ChannelModel {
  double total_loss_db = 0.0;
  double excess_loss_db = 0.0;
  double detection_efficiency = 1.0;
  double dark_rate_cps = 0.0;
  double slot_duration_s = 2e-9;
  double gate_fraction = 1.0;

  double transmittance() const;       ///< 10^-(total+excess)/10, in (0, 1]
  double dark_mean_per_slot() const;  ///< dark_rate * slot * gate_fraction
};

/// Mean photon numbers arriving at the two detectors per output slot.
/// The output timeline has train_length + delay slots.
struct DetectorIntensities {
  int train_length = 0;
  int delay = 0;
  std::vector<double> d0;
  std::vector<double> d1;
};

/// Threshold-detector click list for one round, ordered by slot then
/// detector.
struct ClickRecord {
  struct Click {
    std::uint16_t slot = 0;
    std::uint8_t detector = 0;
  };
  std::uint64_t round_id = 0;
  std::vector<Click> clicks;
};

struct ValidClick {
  int slot = 0;
  int detector = 0;
};

/// Closed-form per-train detection and error probabilities, the oracle the
/// Monte Carlo path is validated against.
struct AnalyticRates {
  double gain = 0.0;
  double error_rate = 0.0;
  std::vector<double> gain_by_delay;   // index d; entry 0 unused
  std::vector<double> error_by_delay;  // index d; entry 0 unused
};

/// Spread a train-total mean over L equal slots; phase pi per set bit.
OpticalTrain build_train(const protocol::PulseTrainRecord& record,
                         double mean_photons_total);

/// Scale all slot means by a transmittance in (0, 1]; phases unchanged.
OpticalTrain apply_loss(OpticalTrain train, double transmittance);

/// Delay-d interferometer: slots where both arms carry a pulse interfere
/// with contrast `visibility` and residual phase `phase_offset`; edge
/// slots fall on each detector with a quarter of the single contributing
/// pulse. Total output photons equal total input photons exactly.
/// delay 0 is allowed (calibration mode, every slot self-overlaps).
DetectorIntensities interferometer_output(const OpticalTrain& train, int delay,
                                          double visibility,
                                          double phase_offset);

/// Sample threshold-detector clicks: for each slot and detector a click
/// fires iff a Poisson draw with mean eta * intensity + dark is >= 1.
ClickRecord sample_clicks(std::uint64_t round_id,
                          const DetectorIntensities& intensities,
                          const ChannelModel& channel, rng::Engine& engine);

/// Earliest click in an overlap slot; a two-detector tie in that slot is
/// broken by a fair bit from the engine. At most one valid click per
/// train.
std::optional<ValidClick> extract_valid(const ClickRecord& clicks, int delay,
                                        int train_length, rng::Engine& engine);

/// Expected gain and error rate by direct probability accounting over the
/// same intensity model the sampler uses. visibility/offset are indexed by
/// delay (size >= train_length; entry 0 unused).
AnalyticRates analytic_gain_and_error(int train_length,
                                      double mean_photons_total,
                                      const ChannelModel& channel,
                                      std::span<const double> visibility_by_delay,
                                      std::span<const double> offset_by_delay);

/// Scalar-visibility convenience overload.
AnalyticRates analytic_gain_and_error(int train_length,
                                      double mean_photons_total,
                                      const ChannelModel& channel,
                                      double visibility, double phase_offset);

}  // namespace rrdps::photonics
