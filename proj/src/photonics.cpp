// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#include "rrdps/photonics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rrdps::photonics {

namespace {

constexpr double kPi = 3.14159265358979323846;

double click_probability(double mean) {
  // P(Poisson(mean) >= 1); expm1 keeps precision at the tiny means here.
  return mean <= 0.0 ? 0.0 : -std::expm1(-mean);
}

void check_delay(int delay, int train_length, bool allow_zero) {
  const int lo = allow_zero ? 0 : 1;
  if (delay < lo || delay > train_length - 1) {
    throw std::domain_error("delay " + std::to_string(delay) +
                            " out of range for train length " +
                            std::to_string(train_length));
  }
}

}  // namespace

double ChannelModel::transmittance() const {
  if (total_loss_db < 0.0 || excess_loss_db < 0.0) {
    throw std::domain_error("loss in dB must be >= 0");
  }
  return std::pow(10.0, -(total_loss_db + excess_loss_db) / 10.0);
}

double ChannelModel::dark_mean_per_slot() const {
  return dark_rate_cps * slot_duration_s * gate_fraction;
}

OpticalTrain build_train(const protocol::PulseTrainRecord& record,
                         double mean_photons_total) {
  if (!(mean_photons_total > 0.0)) {
    throw std::domain_error("build_train: mean photon number must be > 0");
  }
  const std::size_t length = record.phase_bits.size();
  OpticalTrain train;
  train.mean_photons.assign(length, mean_photons_total /
                                        static_cast<double>(length));
  train.phase.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    train.phase[i] = record.phase_bits[i] ? kPi : 0.0;
  }
  return train;
}

OpticalTrain apply_loss(OpticalTrain train, double transmittance) {
  if (!(transmittance > 0.0 && transmittance <= 1.0)) {
    throw std::domain_error("apply_loss: transmittance must lie in (0, 1]");
  }
  for (auto& m : train.mean_photons) m *= transmittance;
  return train;
}

DetectorIntensities interferometer_output(const OpticalTrain& train, int delay,
                                          double visibility,
                                          double phase_offset) {
  const int length = train.size();
  check_delay(delay, length, /*allow_zero=*/true);
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::domain_error("interferometer_output: visibility in [0, 1]");
  }

  DetectorIntensities out;
  out.train_length = length;
  out.delay = delay;
  out.d0.assign(static_cast<std::size_t>(length + delay), 0.0);
  out.d1.assign(static_cast<std::size_t>(length + delay), 0.0);

  for (int t = 0; t < length + delay; ++t) {
    const int short_arm = t;          // undelayed pulse index
    const int long_arm = t - delay;   // delayed pulse index
    const bool has_short = short_arm <= length - 1;
    const bool has_long = long_arm >= 0;
    auto& d0 = out.d0[static_cast<std::size_t>(t)];
    auto& d1 = out.d1[static_cast<std::size_t>(t)];
    if (has_short && has_long) {
      const double ma = train.mean_photons[static_cast<std::size_t>(short_arm)];
      const double mb = train.mean_photons[static_cast<std::size_t>(long_arm)];
      const double mean = 0.5 * (ma + mb);
      double contrast = visibility;
      if (ma != mb) {
        const double sum = ma + mb;
        contrast *= sum > 0.0 ? 2.0 * std::sqrt(ma * mb) / sum : 0.0;
      }
      const double arg = train.phase[static_cast<std::size_t>(short_arm)] -
                         train.phase[static_cast<std::size_t>(long_arm)] +
                         phase_offset;
      const double fringe = contrast * std::cos(arg);
      d0 = 0.5 * mean * (1.0 + fringe);
      d1 = 0.5 * mean * (1.0 - fringe);
    } else if (has_short || has_long) {
      const int idx = has_short ? short_arm : long_arm;
      const double m = train.mean_photons[static_cast<std::size_t>(idx)];
      d0 = 0.25 * m;
      d1 = 0.25 * m;
    }
  }
  return out;
}

ClickRecord sample_clicks(std::uint64_t round_id,
                          const DetectorIntensities& intensities,
                          const ChannelModel& channel, rng::Engine& engine) {
  const double eta = channel.detection_efficiency;
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("sample_clicks: detection efficiency in [0, 1]");
  }
  const double dark = channel.dark_mean_per_slot();
  ClickRecord record;
  record.round_id = round_id;
  const std::size_t slots = intensities.d0.size();
  for (std::size_t t = 0; t < slots; ++t) {
    const double means[2] = {eta * intensities.d0[t] + dark,
                             eta * intensities.d1[t] + dark};
    for (int det = 0; det < 2; ++det) {
      if (rng::uniform01(engine) < click_probability(means[det])) {
        record.clicks.push_back({static_cast<std::uint16_t>(t),
                                 static_cast<std::uint8_t>(det)});
      }
    }
  }
  return record;
}

std::optional<ValidClick> extract_valid(const ClickRecord& clicks, int delay,
                                        int train_length,
                                        rng::Engine& engine) {
  check_delay(delay, train_length, /*allow_zero=*/false);
  int best_slot = -1;
  bool det0 = false;
  bool det1 = false;
  for (const auto& click : clicks.clicks) {
    const int slot = click.slot;
    if (slot < delay || slot > train_length - 1) continue;  // edge slot
    if (best_slot == -1 || slot < best_slot) {
      best_slot = slot;
      det0 = det1 = false;
    }
    if (slot == best_slot) {
      if (click.detector == 0) det0 = true;
      else det1 = true;
    }
  }
  if (best_slot < 0) return std::nullopt;
  int detector;
  if (det0 && det1) {
    detector = static_cast<int>(engine() & 1u);
  } else {
    detector = det0 ? 0 : 1;
  }
  return ValidClick{best_slot, detector};
}

AnalyticRates analytic_gain_and_error(
    int train_length, double mean_photons_total, const ChannelModel& channel,
    std::span<const double> visibility_by_delay,
    std::span<const double> offset_by_delay) {
  if (train_length < 2) {
    throw std::domain_error("analytic_gain_and_error: train length >= 2");
  }
  if (visibility_by_delay.size() < static_cast<std::size_t>(train_length) ||
      offset_by_delay.size() < static_cast<std::size_t>(train_length)) {
    throw std::domain_error(
        "analytic_gain_and_error: per-delay tables must cover every delay");
  }
  const double slot_mean = mean_photons_total /
                           static_cast<double>(train_length) *
                           channel.transmittance() *
                           channel.detection_efficiency;
  const double dark = channel.dark_mean_per_slot();

  AnalyticRates rates;
  rates.gain_by_delay.assign(static_cast<std::size_t>(train_length), 0.0);
  rates.error_by_delay.assign(static_cast<std::size_t>(train_length), 0.0);

  double gain_sum = 0.0;
  double weighted_error = 0.0;
  for (int d = 1; d <= train_length - 1; ++d) {
    const int overlap_slots = train_length - d;
    // Per overlap slot the two detector means always add to the slot mean,
    // so the no-click probability is phase-independent.
    const double q =
        -std::expm1(-static_cast<double>(overlap_slots) *
                    (slot_mean + 2.0 * dark));

    const double fringe = visibility_by_delay[static_cast<std::size_t>(d)] *
                          std::cos(offset_by_delay[static_cast<std::size_t>(d)]);
    const double mean_correct = 0.5 * slot_mean * (1.0 + fringe) + dark;
    const double mean_wrong = 0.5 * slot_mean * (1.0 - fringe) + dark;
    const double p_c = click_probability(mean_correct);
    const double p_w = click_probability(mean_wrong);
    const double p_any = p_c + p_w - p_c * p_w;
    // P(selected detector is the wrong one | some click in the slot);
    // simultaneous clicks are coin-flipped.
    const double err =
        p_any > 0.0 ? (p_w * (1.0 - p_c) + 0.5 * p_c * p_w) / p_any : 0.0;

    rates.gain_by_delay[static_cast<std::size_t>(d)] = q;
    rates.error_by_delay[static_cast<std::size_t>(d)] = err;
    gain_sum += q;
    weighted_error += q * err;
  }
  const double delays = static_cast<double>(train_length - 1);
  rates.gain = gain_sum / delays;
  rates.error_rate = gain_sum > 0.0 ? weighted_error / gain_sum : 0.0;
  return rates;
}

AnalyticRates analytic_gain_and_error(int train_length,
                                      double mean_photons_total,
                                      const ChannelModel& channel,
                                      double visibility, double phase_offset) {
  std::vector<double> vis(static_cast<std::size_t>(train_length), visibility);
  std::vector<double> off(static_cast<std::size_t>(train_length),
                          phase_offset);
  return analytic_gain_and_error(train_length, mean_photons_total, channel,
                                 vis, off);
}

}  // namespace rrdps::photonics
