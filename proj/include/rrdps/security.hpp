// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace rrdps::security {

/// Observables of one RRDPS session, the inputs of the key-rate bounds.
struct SecurityParams {
  int train_length = 128;    ///< L, pulses per train (>= 2)
  double mean_photons = 0.8; ///< train-total mean photon number (> 0)
  double gain = 0.0;         ///< Q, mean valid detections per train, in [0, 1]
  double bit_error = 0.0;    ///< observed bit error rate, in [0, 0.5]

  /// Throws std::domain_error naming the violated bound.
  void validate() const;
};

/// Per-round key-rate decomposition. All costs are per L-pulse train.
struct RateBreakdown {
  int threshold_photons = 0;   ///< n_th; 0 only in the degenerate zero-gain case
  double residual_gain = 0.0;  ///< Q_{n_th} = Q - P(N > n_th)
  double pa_cost = 0.0;        ///< privacy-amplification cost QH_PA
  double ec_cost = 0.0;        ///< error-correction cost Q * H(e_bit)
  double rate_per_round = 0.0; ///< R = Q - ec_cost - pa_cost; may be negative
  double rate_bps = 0.0;       ///< R * trains_per_second (0 when rate unknown)
  bool insecure = false;       ///< rate_per_round <= 0
};

/// Binary Shannon entropy, base 2, with 0 log 0 = 0. Domain: p in [0, 1].
double binary_entropy(double p);

/// Poisson P(N = n) at mean mu, evaluated in log space so large n does not
/// overflow. Domain: n >= 0, mu > 0.
double poisson_pmf(int n, double mu);

/// Poisson P(N >= n_min), computed as 1 - sum of the head terms. Accurate
/// for the small n_min the bounds need; underflows to 0 once the head sum
/// rounds to 1.
double poisson_tail(int n_min, double mu);

/// Phase-error-rate bound for an n-photon train of length L:
/// (1 - (1 - 2/L)^n) / 2. Domain: n >= 0, L >= 2. Result in [0, 1/2].
double phase_error_bound(int n, int train_length);

/// Smallest threshold n_th >= 1 with P(N > n_th) <= gain, so the residual
/// gain Q_{n_th} is non-negative. Among feasible thresholds the smallest
/// also minimizes the privacy-amplification bound. Domain: mu > 0,
/// 0 < gain <= 1.
int select_threshold(double mu, double gain);

/// Privacy-amplification cost per round:
///   Q_{n_th} H(e_ph(n_th)) + sum_{n > n_th} P(N = n) H(e_ph(n)).
/// The infinite sum is truncated once the pmf drops below 1e-15; the
/// remaining tail is added in full (H <= 1) so the bound never
/// underestimates. Throws std::invalid_argument for an infeasible
/// threshold (negative residual gain).
double privacy_amplification_cost(const SecurityParams& params,
                                  int threshold_photons);

/// Full rate evaluation: R = Q - Q H(e_bit) - QH_PA. Negative rates are
/// reported, not clamped; `insecure` flags rate <= 0. gain == 0 yields the
/// degenerate all-zero breakdown.
RateBreakdown key_rate(const SecurityParams& params,
                       double trains_per_second = 0.0);

/// floor(max(0, rate_per_round) * rounds).
std::uint64_t final_key_length(double rate_per_round, std::uint64_t rounds);

}  // namespace rrdps::security
