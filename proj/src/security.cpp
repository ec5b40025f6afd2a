// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#include "rrdps/security.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rrdps::security {

namespace {

// Truncation threshold for the privacy-amplification series.
constexpr double kPmfCutoff = 1e-15;
constexpr int kMaxSeriesTerms = 10'000'000;

[[noreturn]] void domain_fail(const std::string& what) {
  throw std::domain_error(what);
}

}  // namespace

void SecurityParams::validate() const {
  if (train_length < 2) {
    domain_fail("train_length must be >= 2, got " +
                std::to_string(train_length));
  }
  if (!(mean_photons > 0.0)) {
    domain_fail("mean_photons must be > 0, got " +
                std::to_string(mean_photons));
  }
  if (!(gain >= 0.0 && gain <= 1.0)) {
    domain_fail("gain must lie in [0, 1], got " + std::to_string(gain));
  }
  if (!(bit_error >= 0.0 && bit_error <= 0.5)) {
    domain_fail("bit_error must lie in [0, 0.5], got " +
                std::to_string(bit_error));
  }
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    domain_fail("binary_entropy: p must lie in [0, 1], got " +
                std::to_string(p));
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double poisson_pmf(int n, double mu) {
  if (n < 0) domain_fail("poisson_pmf: n must be >= 0");
  if (!(mu > 0.0)) domain_fail("poisson_pmf: mu must be > 0");
  double log_p = -mu + n * std::log(mu) - std::lgamma(n + 1.0);
  return std::exp(log_p);
}

double poisson_tail(int n_min, double mu) {
  if (n_min < 0) domain_fail("poisson_tail: n_min must be >= 0");
  if (!(mu > 0.0)) domain_fail("poisson_tail: mu must be > 0");
  if (n_min == 0) return 1.0;
  double head = 0.0;
  for (int n = 0; n < n_min; ++n) {
    head += poisson_pmf(n, mu);
  }
  double tail = 1.0 - head;
  return tail < 0.0 ? 0.0 : tail;
}

double phase_error_bound(int n, int train_length) {
  if (n < 0) domain_fail("phase_error_bound: n must be >= 0");
  if (train_length < 2) domain_fail("phase_error_bound: L must be >= 2");
  double base = 1.0 - 2.0 / static_cast<double>(train_length);
  return (1.0 - std::pow(base, n)) / 2.0;
}

int select_threshold(double mu, double gain) {
  if (!(mu > 0.0)) domain_fail("select_threshold: mu must be > 0");
  if (!(gain > 0.0 && gain <= 1.0)) {
    domain_fail("select_threshold: gain must lie in (0, 1], got " +
                std::to_string(gain));
  }
  int n_th = 1;
  while (poisson_tail(n_th + 1, mu) > gain) {
    ++n_th;
    if (n_th > 100000) {
      throw std::logic_error("select_threshold: no feasible threshold found");
    }
  }
  return n_th;
}

double privacy_amplification_cost(const SecurityParams& params,
                                  int threshold_photons) {
  params.validate();
  if (threshold_photons < 1) {
    domain_fail("privacy_amplification_cost: threshold must be >= 1");
  }
  const double mu = params.mean_photons;
  const int length = params.train_length;
  double residual = params.gain - poisson_tail(threshold_photons + 1, mu);
  if (residual < -1e-12) {
    throw std::invalid_argument(
        "privacy_amplification_cost: infeasible threshold, residual gain " +
        std::to_string(residual));
  }
  if (residual < 0.0) residual = 0.0;

  double cost =
      residual * binary_entropy(phase_error_bound(threshold_photons, length));
  for (int n = threshold_photons + 1;; ++n) {
    double p = poisson_pmf(n, mu);
    if (p < kPmfCutoff) {
      // Remaining tail is below pmf(n) * (n+1)/(n+1-mu); count it at the
      // maximal entropy H = 1 so the bound stays valid.
      double denom = static_cast<double>(n) + 1.0 - mu;
      if (denom > 0.0) {
        cost += p * (static_cast<double>(n) + 1.0) / denom;
      } else {
        cost += poisson_tail(n, mu);
      }
      break;
    }
    cost += p * binary_entropy(phase_error_bound(n, length));
    if (n - threshold_photons > kMaxSeriesTerms) {
      throw std::logic_error("privacy_amplification_cost: series too long");
    }
  }
  return cost;
}

RateBreakdown key_rate(const SecurityParams& params,
                       double trains_per_second) {
  params.validate();
  RateBreakdown out;
  if (params.gain == 0.0) {
    out.insecure = true;
    return out;
  }
  out.threshold_photons = select_threshold(params.mean_photons, params.gain);
  out.residual_gain =
      params.gain - poisson_tail(out.threshold_photons + 1, params.mean_photons);
  if (out.residual_gain < 0.0) out.residual_gain = 0.0;
  out.pa_cost = privacy_amplification_cost(params, out.threshold_photons);
  out.ec_cost = params.gain * binary_entropy(params.bit_error);
  out.rate_per_round = params.gain - out.ec_cost - out.pa_cost;
  out.rate_bps = out.rate_per_round * trains_per_second;
  out.insecure = out.rate_per_round <= 0.0;
  return out;
}

std::uint64_t final_key_length(double rate_per_round, std::uint64_t rounds) {
  if (rate_per_round <= 0.0 || rounds == 0) return 0;
  double bits = std::floor(rate_per_round * static_cast<double>(rounds));
  return static_cast<std::uint64_t>(bits);
}

}  // namespace rrdps::security
