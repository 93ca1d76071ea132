// Copyright 2026 The partext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <zlib.h>

#include <algorithm>
#include <climits>
#include <cstdint>
#include <set>

#include "partext/error.hpp"
#include "partext/medbox.hpp"

namespace partext::zip {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint16_t kVersion = 20;
constexpr std::uint16_t kUtf8Flag = 0x0800;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01
constexpr std::uint16_t kStored = 0;
constexpr std::uint16_t kDeflated = 8;

void put16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xff);
  out += static_cast<char>(v >> 8);
}

void put32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out += static_cast<char>((v >> (8 * k)) & 0xff);
}

[[noreturn]] void not_a_zip(const std::string& why) { throw Error(ErrorCode::NotAZip, "not a usable zip archive: " + why); }

std::uint32_t crc_of(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < data.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - done, UINT_MAX));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + done), chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string deflate_raw(std::string_view data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::Io, "deflateInit2 failed");
  }
  std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorCode::Io, "deflate failed");
  out.resize(produced);
  return out;
}

std::string inflate_raw(std::string_view data, std::size_t expected) {
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw Error(ErrorCode::Io, "inflateInit2 failed");
  std::string out(expected, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  if (rc == Z_BUF_ERROR && expected == 0 && zs.avail_in == 0) rc = Z_STREAM_END;
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) not_a_zip("corrupt deflate stream");
  return out;
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint16_t u16(std::size_t at) const {
    need(at, 2);
    return static_cast<std::uint16_t>(byte(at) | (byte(at + 1) << 8));
  }
  std::uint32_t u32(std::size_t at) const {
    need(at, 4);
    return static_cast<std::uint32_t>(byte(at)) | (static_cast<std::uint32_t>(byte(at + 1)) << 8) |
           (static_cast<std::uint32_t>(byte(at + 2)) << 16) | (static_cast<std::uint32_t>(byte(at + 3)) << 24);
  }
  std::string_view bytes(std::size_t at, std::size_t n) const {
    need(at, n);
    return data_.substr(at, n);
  }
  std::size_t size() const { return data_.size(); }

 private:
  unsigned byte(std::size_t at) const { return static_cast<unsigned char>(data_[at]); }
  void need(std::size_t at, std::size_t n) const {
    if (at > data_.size() || n > data_.size() - at) not_a_zip("truncated");
  }
  std::string_view data_;
};

}  // namespace

std::string write(std::vector<Member> members) {
  std::sort(members.begin(), members.end(), [](const Member& a, const Member& b) { return a.name < b.name; });
  std::string out;
  std::string central;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto& m = members[k];
    if (m.name.empty() || m.name.size() > 0xffff) throw Error(ErrorCode::InvalidArgument, "bad zip member name");
    if (k > 0 && members[k - 1].name == m.name) {
      throw Error(ErrorCode::InvalidArgument, "duplicate zip member '" + m.name + "'");
    }
    if (m.data.size() >= 0xffffffffULL || out.size() >= 0xffffffffULL) {
      throw Error(ErrorCode::InvalidArgument, "archive too large for zip without zip64");
    }
    const auto crc = crc_of(m.data);
    std::string packed = deflate_raw(m.data);
    std::uint16_t method = kDeflated;
    if (packed.size() >= m.data.size()) {
      packed = m.data;
      method = kStored;
    }
    const auto offset = static_cast<std::uint32_t>(out.size());
    auto header = [&](std::string& dst, bool is_central) {
      put32(dst, is_central ? kCentralSig : kLocalSig);
      if (is_central) put16(dst, kVersion);
      put16(dst, kVersion);
      put16(dst, kUtf8Flag);
      put16(dst, method);
      put16(dst, 0);
      put16(dst, kDosDate);
      put32(dst, crc);
      put32(dst, static_cast<std::uint32_t>(packed.size()));
      put32(dst, static_cast<std::uint32_t>(m.data.size()));
      put16(dst, static_cast<std::uint16_t>(m.name.size()));
      put16(dst, 0);
      if (is_central) {
        put16(dst, 0);  // comment
        put16(dst, 0);  // disk
        put16(dst, 0);  // internal attributes
        put32(dst, 0);  // external attributes
        put32(dst, offset);
      }
      dst += m.name;
    };
    header(out, false);
    out += packed;
    header(central, true);
  }
  if (members.size() > 0xffff) throw Error(ErrorCode::InvalidArgument, "too many zip members");
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  put32(out, kEndSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(members.size()));
  put16(out, static_cast<std::uint16_t>(members.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, cd_offset);
  put16(out, 0);
  return out;
}

std::vector<Member> read(std::string_view archive) {
  const Reader r(archive);
  if (archive.size() < 22) not_a_zip("too short");
  std::size_t end = std::string_view::npos;
  const std::size_t lowest = archive.size() > 22 + 0xffff ? archive.size() - 22 - 0xffff : 0;
  for (std::size_t at = archive.size() - 22 + 1; at-- > lowest;) {
    if (r.u32(at) == kEndSig && at + 22 + r.u16(at + 20) == archive.size()) {
      end = at;
      break;
    }
  }
  if (end == std::string_view::npos) not_a_zip("no end of central directory");
  if (r.u16(end + 4) != 0 || r.u16(end + 6) != 0) not_a_zip("multi-disk archives are not supported");
  const std::size_t count = r.u16(end + 10);
  const std::size_t cd_size = r.u32(end + 12);
  std::size_t at = r.u32(end + 16);
  if (at == 0xffffffff || cd_size == 0xffffffff || count == 0xffff) not_a_zip("zip64 is not supported");
  if (at + cd_size > end) not_a_zip("central directory out of range");

  std::vector<Member> out;
  std::set<std::string> seen;
  for (std::size_t k = 0; k < count; ++k) {
    if (r.u32(at) != kCentralSig) not_a_zip("bad central directory entry");
    const auto flags = r.u16(at + 8);
    const auto method = r.u16(at + 10);
    const auto crc = r.u32(at + 16);
    const std::size_t packed = r.u32(at + 20);
    const std::size_t plain = r.u32(at + 24);
    const std::size_t name_len = r.u16(at + 28);
    const std::size_t extra_len = r.u16(at + 30);
    const std::size_t comment_len = r.u16(at + 32);
    const std::size_t local = r.u32(at + 42);
    std::string name(r.bytes(at + 46, name_len));
    at += 46 + name_len + extra_len + comment_len;

    if (flags & 0x1) not_a_zip("encrypted member '" + name + "'");
    if (packed == 0xffffffff || plain == 0xffffffff || local == 0xffffffff) not_a_zip("zip64 is not supported");
    if (r.u32(local) != kLocalSig) not_a_zip("bad local header for '" + name + "'");
    const std::size_t data_at = local + 30 + r.u16(local + 26) + r.u16(local + 28);
    const auto raw = r.bytes(data_at, packed);
    if (!name.empty() && name.back() == '/') continue;
    if (!seen.insert(name).second) not_a_zip("duplicate member '" + name + "'");

    std::string data;
    if (method == kStored) {
      if (packed != plain) not_a_zip("size mismatch for '" + name + "'");
      data = std::string(raw);
    } else if (method == kDeflated) {
      data = inflate_raw(raw, plain);
    } else {
      not_a_zip("unsupported compression method " + std::to_string(method));
    }
    if (crc_of(data) != crc) not_a_zip("CRC mismatch for '" + name + "'");
    out.push_back({std::move(name), std::move(data)});
  }
  return out;
}

}  // namespace partext::zip
