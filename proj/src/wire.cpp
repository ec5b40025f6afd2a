// Copyright (c) 2026 rrdps-sim contributors
// SPDX-License-Identifier: Apache-2.0
#include "rrdps/wire.hpp"

#include <stdexcept>

namespace rrdps::wire {

namespace {

void put_u16(std::uint16_t v, std::vector<std::uint8_t>& out) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::uint32_t v, std::vector<std::uint8_t>& out) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_u64(std::uint64_t v, std::vector<std::uint8_t>& out) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> buf, std::size_t offset)
      : buf_(buf), pos_(offset) {}

  std::uint16_t u16() { return static_cast<std::uint16_t>(take(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  std::uint64_t u64() { return take(8); }
  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)); }
  std::size_t pos() const { return pos_; }

 private:
  std::uint64_t take(int bytes) {
    if (pos_ + static_cast<std::size_t>(bytes) > buf_.size()) {
      throw std::runtime_error("wire: truncated record");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(buf_[pos_ + static_cast<std::size_t>(i)])
           << (8 * i);
    }
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }

  std::span<const std::uint8_t> buf_;
  std::size_t pos_;
};

std::uint32_t read_length(Reader& r, std::uint32_t expected_min) {
  const std::uint32_t len = r.u32();
  if (len < expected_min) throw std::runtime_error("wire: length mismatch");
  return len;
}

}  // namespace

void encode(const protocol::Announcement& ann, std::vector<std::uint8_t>& out) {
  put_u32(12, out);
  put_u64(ann.round_id, out);
  put_u16(static_cast<std::uint16_t>(ann.first), out);
  put_u16(static_cast<std::uint16_t>(ann.second), out);
}

void encode(const protocol::SiftedRecord& rec, std::vector<std::uint8_t>& out) {
  put_u32(16, out);
  put_u64(rec.round_id, out);
  put_u16(static_cast<std::uint16_t>(rec.first), out);
  put_u16(static_cast<std::uint16_t>(rec.second), out);
  put_u16(static_cast<std::uint16_t>(rec.delay), out);
  out.push_back(rec.alice_bit);
  out.push_back(rec.bob_bit);
}

void encode(const photonics::ClickRecord& rec, std::vector<std::uint8_t>& out) {
  const auto count = static_cast<std::uint32_t>(rec.clicks.size());
  if (count > 0xffff) throw std::runtime_error("wire: too many clicks");
  put_u32(10 + 3 * count, out);
  put_u64(rec.round_id, out);
  put_u16(static_cast<std::uint16_t>(count), out);
  for (const auto& c : rec.clicks) {
    put_u16(c.slot, out);
    out.push_back(c.detector);
  }
}

protocol::Announcement decode_announcement(std::span<const std::uint8_t> buf,
                                           std::size_t& offset) {
  Reader r(buf, offset);
  if (read_length(r, 12) != 12) throw std::runtime_error("wire: bad length");
  protocol::Announcement ann;
  ann.round_id = r.u64();
  ann.first = r.u16();
  ann.second = r.u16();
  offset = r.pos();
  return ann;
}

protocol::SiftedRecord decode_sifted(std::span<const std::uint8_t> buf,
                                     std::size_t& offset) {
  Reader r(buf, offset);
  if (read_length(r, 16) != 16) throw std::runtime_error("wire: bad length");
  protocol::SiftedRecord rec;
  rec.round_id = r.u64();
  rec.first = r.u16();
  rec.second = r.u16();
  rec.delay = r.u16();
  rec.alice_bit = r.u8();
  rec.bob_bit = r.u8();
  offset = r.pos();
  return rec;
}

photonics::ClickRecord decode_clicks(std::span<const std::uint8_t> buf,
                                     std::size_t& offset) {
  Reader r(buf, offset);
  const std::uint32_t len = read_length(r, 10);
  photonics::ClickRecord rec;
  rec.round_id = r.u64();
  const std::uint16_t count = r.u16();
  if (len != 10u + 3u * count) throw std::runtime_error("wire: bad length");
  rec.clicks.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    photonics::ClickRecord::Click c;
    c.slot = r.u16();
    c.detector = r.u8();
    rec.clicks.push_back(c);
  }
  offset = r.pos();
  return rec;
}

}  // namespace rrdps::wire
