// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rrdps/random.hpp"

namespace rrdps::protocol {

/// Alice's side of one round: L phase bits, bit 1 meaning a pi shift.
struct PulseTrainRecord {
  std::uint64_t round_id = 0;
  std::vector<std::uint8_t> phase_bits;
};

/// Bob's random delay for one round. `direction` is the sign bit c and
/// `delay` the magnitude d in {1, ..., L-1}; the signed shift is
/// (-1)^c * d. `gate_word` is the binary encoding of d driving the delay
/// gates (7 bits for the 128-pulse configuration; gate i-1 set means gate
/// DG_i is switched into the path).
struct DelayChoice {
  int direction = 0;
  int delay = 1;
  std::uint8_t gate_word = 1;

  int signed_shift() const { return direction == 0 ? delay : -delay; }
};

/// Public announcement of the interfering pulse-index pair.
/// second == (first + signed shift) mod L.
struct Announcement {
  std::uint64_t round_id = 0;
  int first = 0;
  int second = 0;
};

/// A valid click reduced to its pulse-index pair (low < high) and Bob's bit.
struct Detection {
  int low = 0;
  int high = 0;
  std::uint8_t bob_bit = 0;
};

/// One sifted bit with everything needed for bookkeeping.
struct SiftedRecord {
  std::uint64_t round_id = 0;
  int first = 0;
  int second = 0;
  int delay = 1;
  std::uint8_t alice_bit = 0;
  std::uint8_t bob_bit = 0;
};

/// Draw L uniform phase bits. Deterministic given the stream; a drained
/// finite stream throws rather than reusing bits.
PulseTrainRecord alice_encode(std::uint64_t round_id, int train_length,
                              rng::BitStream& bits);

/// Draw the delay: ceil(log2 L) bits MSB-first, rejecting 0 and values
/// >= L, then one direction bit. For L = 128 this is the 7-bit gate word
/// with only the zero word rejected.
DelayChoice bob_choose_delay(int train_length, rng::BitStream& bits);

/// Optical delay of a gate word: gate DG_i contributes 2^(i-1) * 2 ns, so
/// the word w maps to 2w ns, bijective onto {0, 2, ..., 254} ns.
double gate_delay_ns(unsigned gate_word);

/// Map a click on the interferometer output timeline (slot in
/// [0, L-1+d]) to the contributing pulse pair. Slots where only one arm
/// carries a pulse are invalid and yield nothing. Bob's bit is the
/// detector id (detector 0 = constructive port under ideal calibration).
std::optional<Detection> interpret_detection(int click_slot, int detector,
                                             const DelayChoice& choice,
                                             int train_length);

/// Orient the detected pair per the direction bit: c = 0 announces
/// (low, high), c = 1 announces (high, low).
Announcement make_announcement(std::uint64_t round_id, const Detection& det,
                               const DelayChoice& choice, int train_length);

/// Alice's sifted bit s_i xor s_j. Throws ProtocolError on a round-id
/// mismatch or an index pair the round cannot have produced.
std::uint8_t sift(const PulseTrainRecord& record, const Announcement& ann);

struct DelayTally {
  std::uint64_t sifted = 0;
  std::uint64_t errors = 0;
};

/// Per-delay sift/error counters plus session totals. Single-writer;
/// parallel shards each own a ledger and merge when done.
class SessionLedger {
 public:
  explicit SessionLedger(int train_length);

  void record_round(std::uint64_t count = 1) { rounds_sent_ += count; }
  void record(const SiftedRecord& rec);
  void merge(const SessionLedger& other);

  int train_length() const { return train_length_; }
  std::uint64_t rounds_sent() const { return rounds_sent_; }
  std::uint64_t valid_detections() const { return valid_; }
  std::uint64_t sifted_total() const { return sifted_total_; }
  const DelayTally& tally(int delay) const;

  /// Q estimate: valid detections / rounds sent (0 for an empty session).
  double gain() const;
  /// e_bit for one delay (0 when that delay has no sifted bits).
  double error_rate(int delay) const;
  /// Count-weighted mean error rate over all delays.
  double mean_error_rate() const;

 private:
  int train_length_;
  std::uint64_t rounds_sent_ = 0;
  std::uint64_t valid_ = 0;
  std::uint64_t sifted_total_ = 0;
  std::vector<DelayTally> by_delay_;  // index d; entry 0 unused
};

}  // namespace rrdps::protocol
