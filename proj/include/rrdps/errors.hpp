// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rrdps {

/// Bad or inconsistent run configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Security-analysis inputs violate a bound. CLI exit code 3.
class InfeasibleSecurityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A finite randomness source ran out of bits.
class RandomnessExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fringe counts too small to form the fractions the estimator needs.
class InsufficientCounts : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A message does not belong to the round being processed.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rrdps
