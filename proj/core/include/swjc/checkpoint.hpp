// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// "SWJC" checkpoint archive: magic, format version, a config snapshot, an
// entry table (name, dims, dtype, byte offset) and one contiguous
// float32 little-endian payload. Loads are validated before any weight is
// read; round-trips are bit-exact at the archive's dtype.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "swjc/common.hpp"
#include "swjc/nn.hpp"

namespace swjc {

class CorruptHeaderError : public Error {
 public:
  explicit CorruptHeaderError(const std::string& msg) : Error("checkpoint: " + msg) {}
};
class UnknownVersionError : public Error {
 public:
  explicit UnknownVersionError(const std::string& msg) : Error("checkpoint: " + msg) {}
};
class TruncatedPayloadError : public Error {
 public:
  explicit TruncatedPayloadError(const std::string& msg) : Error("checkpoint: " + msg) {}
};

struct Checkpoint {
  static constexpr uint32_t kVersion = 1;

  struct Entry {
    std::string name;
    std::vector<int> dims;
    uint64_t offset = 0;  // bytes into the payload

    int64_t count() const {
      int64_t n = 1;
      for (int d : dims) n *= d;
      return n;
    }
  };

  std::vector<std::pair<std::string, std::string>> config;
  std::vector<Entry> entries;
  std::vector<float> payload;

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

  const Entry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }

  std::map<std::string, std::string> config_map() const {
    return std::map<std::string, std::string>(config.begin(), config.end());
  }
};

template <typename S>
Checkpoint make_checkpoint(const ParamStore<S>& params,
                           std::vector<std::pair<std::string, std::string>> config) {
  Checkpoint ck;
  ck.config = std::move(config);
  uint64_t offset = 0;
  for (const auto* p : params.all()) {
    Checkpoint::Entry e;
    e.name = p->name;
    e.dims = p->value.shape();
    e.offset = offset;
    offset += static_cast<uint64_t>(p->value.size()) * sizeof(float);
    ck.entries.push_back(std::move(e));
  }
  ck.payload.resize(offset / sizeof(float));
  uint64_t at = 0;
  for (const auto* p : params.all())
    for (int64_t i = 0; i < p->value.size(); ++i)
      ck.payload[static_cast<size_t>(at++)] = static_cast<float>(p->value[i]);
  return ck;
}

// Copies weights into an existing store; every entry must match a
// parameter of identical name and shape and vice versa.
template <typename S>
void load_checkpoint_params(const Checkpoint& ck, ParamStore<S>& params) {
  check_arg(ck.entries.size() == params.all().size(),
            "checkpoint: parameter count mismatch with model");
  for (const auto& e : ck.entries) {
    Parameter<S>* p = params.find(e.name);
    check_arg(p != nullptr, "checkpoint: model has no parameter named " + e.name);
    check_arg(p->value.shape() == e.dims, "checkpoint: shape mismatch for " + e.name);
    const size_t base = static_cast<size_t>(e.offset / sizeof(float));
    for (int64_t i = 0; i < p->value.size(); ++i)
      p->value[i] = static_cast<S>(ck.payload[base + static_cast<size_t>(i)]);
  }
}

}  // namespace swjc
