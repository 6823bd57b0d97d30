// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#include "swjc/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>

namespace swjc {

namespace {

constexpr char kMagic[4] = {'S', 'W', 'J', 'C'};

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const std::string& buf, size_t at) : buf_(buf), at_(at) {}

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(buf_[at_ + static_cast<size_t>(i)])) << (8 * i);
    at_ += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(buf_[at_ + static_cast<size_t>(i)])) << (8 * i);
    at_ += 8;
    return v;
  }
  std::string bytes(size_t n) {
    need(n);
    std::string s = buf_.substr(at_, n);
    at_ += n;
    return s;
  }
  size_t at() const { return at_; }
  size_t remaining() const { return buf_.size() - at_; }

 private:
  void need(size_t n) {
    if (at_ + n > buf_.size()) throw CorruptHeaderError("table runs past end of file");
  }
  const std::string& buf_;
  size_t at_;
};

}  // namespace

void Checkpoint::save(const std::filesystem::path& path) const {
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  std::string cfg;
  for (const auto& [k, v] : config) cfg += k + "=" + v + "\n";
  put_u64(out, cfg.size());
  out += cfg;
  put_u64(out, entries.size());
  for (const auto& e : entries) {
    put_u32(out, static_cast<uint32_t>(e.name.size()));
    out += e.name;
    put_u32(out, static_cast<uint32_t>(e.dims.size()));
    for (int d : e.dims) put_u32(out, static_cast<uint32_t>(d));
    put_u32(out, 0);  // dtype 0: float32 little-endian
    put_u64(out, e.offset);
  }
  put_u64(out, payload.size() * sizeof(float));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  check_arg(f.good(), "checkpoint: cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  // serialize floats explicitly as little-endian words
  std::string pay;
  pay.reserve(payload.size() * 4);
  for (float v : payload) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(pay, bits);
  }
  f.write(pay.data(), static_cast<std::streamsize>(pay.size()));
  check_arg(f.good(), "checkpoint: write failed: " + path.string());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  check_arg(f.good(), "checkpoint: cannot open: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw CorruptHeaderError("bad magic");
  Reader r(buf, 4);
  const uint32_t version = r.u32();
  if (version != kVersion)
    throw UnknownVersionError("unknown format version " + std::to_string(version));

  Checkpoint ck;
  const uint64_t cfg_len = r.u64();
  if (cfg_len > r.remaining()) throw CorruptHeaderError("config block runs past end of file");
  {
    const std::string cfg = r.bytes(static_cast<size_t>(cfg_len));
    size_t pos = 0;
    while (pos < cfg.size()) {
      size_t eol = cfg.find('\n', pos);
      if (eol == std::string::npos) eol = cfg.size();
      const std::string line = cfg.substr(pos, eol - pos);
      pos = eol + 1;
      if (line.empty()) continue;
      const size_t eq = line.find('=');
      if (eq == std::string::npos) throw CorruptHeaderError("malformed config line");
      ck.config.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
  }

  const uint64_t n_entries = r.u64();
  std::set<std::string> names;
  for (uint64_t i = 0; i < n_entries; ++i) {
    Entry e;
    const uint32_t name_len = r.u32();
    e.name = r.bytes(name_len);
    const uint32_t rank = r.u32();
    if (rank > 8) throw CorruptHeaderError("implausible tensor rank for " + e.name);
    for (uint32_t d = 0; d < rank; ++d) e.dims.push_back(static_cast<int>(r.u32()));
    const uint32_t dtype = r.u32();
    if (dtype != 0) throw CorruptHeaderError("unsupported dtype for " + e.name);
    e.offset = r.u64();
    if (!names.insert(e.name).second) throw CorruptHeaderError("duplicate entry name " + e.name);
    ck.entries.push_back(std::move(e));
  }

  const uint64_t payload_len = r.u64();
  if (payload_len % 4 != 0) throw CorruptHeaderError("payload length not a whole number of floats");

  // validate offsets before reading any weight bytes
  {
    std::vector<const Entry*> by_offset;
    for (const auto& e : ck.entries) by_offset.push_back(&e);
    std::sort(by_offset.begin(), by_offset.end(),
              [](const Entry* a, const Entry* b) { return a->offset < b->offset; });
    uint64_t prev_end = 0;
    for (const Entry* e : by_offset) {
      const uint64_t size = static_cast<uint64_t>(e->count()) * sizeof(float);
      if (e->offset % 4 != 0) throw CorruptHeaderError("misaligned offset for " + e->name);
      if (e->offset < prev_end) throw CorruptHeaderError("overlapping entries at " + e->name);
      if (e->offset + size > payload_len)
        throw CorruptHeaderError("entry " + e->name + " exceeds declared payload");
      prev_end = e->offset + size;
    }
    // name the first entry whose bytes are missing from a short file
    const uint64_t have = r.remaining();
    if (have < payload_len) {
      for (const Entry* e : by_offset) {
        const uint64_t size = static_cast<uint64_t>(e->count()) * sizeof(float);
        if (e->offset + size > have)
          throw TruncatedPayloadError("payload truncated; first unreadable entry: " + e->name);
      }
      throw TruncatedPayloadError("payload truncated");
    }
  }

  ck.payload.resize(static_cast<size_t>(payload_len / 4));
  for (size_t i = 0; i < ck.payload.size(); ++i) {
    const uint32_t bits = r.u32();
    std::memcpy(&ck.payload[i], &bits, 4);
  }
  return ck;
}

}  // namespace swjc
