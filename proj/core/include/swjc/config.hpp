// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Plain-text key-value configuration with [section] headers, '#' comments
// and comma-separated lists. Consumers declare the keys they accept;
// anything else is an error.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swjc/common.hpp"

namespace swjc {

class ConfigFile {
 public:
  static ConfigFile parse_file(const std::filesystem::path& path);
  static ConfigFile parse_string(const std::string& text);

  bool has_section(const std::string& section) const;
  std::vector<std::string> sections() const;

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  std::string require(const std::string& section, const std::string& key) const;

  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  std::vector<double> fallback) const;
  std::vector<int> get_ints(const std::string& section, const std::string& key,
                            std::vector<int> fallback) const;

  // Throws InvalidArgument when `section` contains a key outside `allowed`.
  void restrict_keys(const std::string& section, const std::vector<std::string>& allowed) const;

  // Throws when the file contains a section not in `allowed` (prefix match
  // for numbered sections like phase1, phase2, ...).
  void restrict_sections(const std::vector<std::string>& allowed_exact,
                         const std::vector<std::string>& allowed_prefixes) const;

 private:
  // section -> ordered key/value pairs
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> data_;

  const std::vector<std::pair<std::string, std::string>>* find_section(
      const std::string& section) const;
};

std::vector<double> parse_double_list(const std::string& s);

}  // namespace swjc
