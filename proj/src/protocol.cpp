// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#include "rrdps/protocol.hpp"

#include <bit>
#include <stdexcept>
#include <string>

#include "rrdps/errors.hpp"

namespace rrdps::protocol {

namespace {

void check_train_length(int train_length) {
  if (train_length < 2) {
    throw std::domain_error("train_length must be >= 2, got " +
                            std::to_string(train_length));
  }
}

}  // namespace

PulseTrainRecord alice_encode(std::uint64_t round_id, int train_length,
                              rng::BitStream& bits) {
  check_train_length(train_length);
  PulseTrainRecord record;
  record.round_id = round_id;
  record.phase_bits.resize(static_cast<std::size_t>(train_length));
  for (auto& b : record.phase_bits) {
    b = static_cast<std::uint8_t>(bits.next());
  }
  return record;
}

DelayChoice bob_choose_delay(int train_length, rng::BitStream& bits) {
  check_train_length(train_length);
  if (train_length > 256) {
    throw std::domain_error("bob_choose_delay: train_length above the "
                            "8-bit gate-word range");
  }
  const int width = std::bit_width(
      static_cast<unsigned>(train_length - 1));
  std::uint64_t value = 0;
  do {
    value = bits.next_word(width);
  } while (value == 0 || value >= static_cast<std::uint64_t>(train_length));
  DelayChoice choice;
  choice.delay = static_cast<int>(value);
  choice.gate_word = static_cast<std::uint8_t>(value);
  choice.direction = bits.next();
  return choice;
}

double gate_delay_ns(unsigned gate_word) {
  if (gate_word > 127) {
    throw std::domain_error("gate_delay_ns: word must fit in 7 bits, got " +
                            std::to_string(gate_word));
  }
  return 2.0 * static_cast<double>(gate_word);
}

std::optional<Detection> interpret_detection(int click_slot, int detector,
                                             const DelayChoice& choice,
                                             int train_length) {
  check_train_length(train_length);
  const int d = choice.delay;
  if (d < 1 || d > train_length - 1) {
    throw std::domain_error("interpret_detection: delay out of range");
  }
  if (click_slot < 0 || click_slot > train_length - 1 + d) {
    throw std::domain_error("interpret_detection: slot " +
                            std::to_string(click_slot) +
                            " outside the output timeline");
  }
  if (detector != 0 && detector != 1) {
    throw std::domain_error("interpret_detection: detector must be 0 or 1");
  }
  // Short arm contributes pulse `click_slot`, long arm pulse
  // `click_slot - d`; both must exist for the click to be valid.
  if (click_slot < d || click_slot > train_length - 1) return std::nullopt;
  Detection det;
  det.low = click_slot - d;
  det.high = click_slot;
  det.bob_bit = static_cast<std::uint8_t>(detector);
  return det;
}

Announcement make_announcement(std::uint64_t round_id, const Detection& det,
                               const DelayChoice& choice, int train_length) {
  check_train_length(train_length);
  if (det.high - det.low != choice.delay) {
    throw ProtocolError("announcement pair does not match the chosen delay");
  }
  Announcement ann;
  ann.round_id = round_id;
  if (choice.direction == 0) {
    ann.first = det.low;
    ann.second = det.high;
  } else {
    ann.first = det.high;
    ann.second = det.low;
  }
  return ann;
}

std::uint8_t sift(const PulseTrainRecord& record, const Announcement& ann) {
  if (ann.round_id != record.round_id) {
    throw ProtocolError("announcement round " + std::to_string(ann.round_id) +
                        " does not match record round " +
                        std::to_string(record.round_id));
  }
  const int length = static_cast<int>(record.phase_bits.size());
  if (ann.first < 0 || ann.first >= length || ann.second < 0 ||
      ann.second >= length || ann.first == ann.second) {
    throw ProtocolError("announcement indices invalid for this round");
  }
  return record.phase_bits[static_cast<std::size_t>(ann.first)] ^
         record.phase_bits[static_cast<std::size_t>(ann.second)];
}

SessionLedger::SessionLedger(int train_length)
    : train_length_(train_length),
      by_delay_(static_cast<std::size_t>(train_length)) {
  check_train_length(train_length);
}

void SessionLedger::record(const SiftedRecord& rec) {
  if (rec.delay < 1 || rec.delay >= train_length_) {
    throw std::domain_error("ledger: delay out of range");
  }
  ++valid_;
  ++sifted_total_;
  auto& tally = by_delay_[static_cast<std::size_t>(rec.delay)];
  ++tally.sifted;
  if (rec.alice_bit != rec.bob_bit) ++tally.errors;
}

void SessionLedger::merge(const SessionLedger& other) {
  if (other.train_length_ != train_length_) {
    throw std::domain_error("ledger merge: train length mismatch");
  }
  rounds_sent_ += other.rounds_sent_;
  valid_ += other.valid_;
  sifted_total_ += other.sifted_total_;
  for (std::size_t d = 0; d < by_delay_.size(); ++d) {
    by_delay_[d].sifted += other.by_delay_[d].sifted;
    by_delay_[d].errors += other.by_delay_[d].errors;
  }
}

const DelayTally& SessionLedger::tally(int delay) const {
  if (delay < 1 || delay >= train_length_) {
    throw std::domain_error("ledger: delay out of range");
  }
  return by_delay_[static_cast<std::size_t>(delay)];
}

double SessionLedger::gain() const {
  if (rounds_sent_ == 0) return 0.0;
  return static_cast<double>(valid_) / static_cast<double>(rounds_sent_);
}

double SessionLedger::error_rate(int delay) const {
  const auto& t = tally(delay);
  if (t.sifted == 0) return 0.0;
  return static_cast<double>(t.errors) / static_cast<double>(t.sifted);
}

double SessionLedger::mean_error_rate() const {
  std::uint64_t errors = 0;
  for (const auto& t : by_delay_) errors += t.errors;
  if (sifted_total_ == 0) return 0.0;
  return static_cast<double>(errors) / static_cast<double>(sifted_total_);
}

}  // namespace rrdps::protocol
