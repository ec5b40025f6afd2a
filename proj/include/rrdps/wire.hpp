// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rrdps/photonics.hpp"
#include "rrdps/protocol.hpp"

namespace rrdps::wire {

// Length-prefixed little-endian records, one format per message type so a
// networked deployment can reuse them. Streams are homogeneous (one record
// type per stream). Layouts after the u32 length prefix:
//   Announcement: u64 round_id | u16 first | u16 second            (12 B)
//   SiftedRecord: u64 round_id | u16 first | u16 second | u16 delay
//                 | u8 alice_bit | u8 bob_bit                      (16 B)
//   ClickRecord:  u64 round_id | u16 count | count * (u16 slot, u8 det)

void encode(const protocol::Announcement& ann, std::vector<std::uint8_t>& out);
void encode(const protocol::SiftedRecord& rec, std::vector<std::uint8_t>& out);
void encode(const photonics::ClickRecord& rec, std::vector<std::uint8_t>& out);

/// Each decode consumes one record starting at `offset`, advances it, and
/// throws std::runtime_error on truncation or a length mismatch.
protocol::Announcement decode_announcement(std::span<const std::uint8_t> buf,
                                           std::size_t& offset);
protocol::SiftedRecord decode_sifted(std::span<const std::uint8_t> buf,
                                     std::size_t& offset);
photonics::ClickRecord decode_clicks(std::span<const std::uint8_t> buf,
                                     std::size_t& offset);

}  // namespace rrdps::wire
