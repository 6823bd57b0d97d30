// Copyright (c) 2026 The swjc Authors
// SPDX-License-Identifier: Apache-2.0

#include "swjc/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace swjc {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    // accept simple fractions like 1/3
    const size_t slash = tok.find('/');
    if (slash != std::string::npos) {
      out.push_back(std::stod(tok.substr(0, slash)) / std::stod(tok.substr(slash + 1)));
    } else {
      out.push_back(std::stod(tok));
    }
  }
  check_arg(!out.empty(), "config: empty numeric list");
  return out;
}

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  check_arg(in.good(), "config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
  ConfigFile cf;
  std::stringstream ss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      check_arg(line.back() == ']', "config: malformed section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      check_arg(!section.empty(), "config: empty section name at line " + std::to_string(lineno));
      if (!cf.find_section(section)) cf.data_.emplace_back(section, std::vector<std::pair<std::string, std::string>>{});
      continue;
    }
    const size_t eq = line.find('=');
    check_arg(eq != std::string::npos, "config: expected key=value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    check_arg(!key.empty(), "config: empty key at line " + std::to_string(lineno));
    check_arg(!section.empty(), "config: key outside any [section] at line " + std::to_string(lineno));
    for (auto& [name, kvs] : cf.data_) {
      if (name == section) {
        for (auto& [k, v] : kvs)
          check_arg(k != key, "config: duplicate key '" + key + "' in [" + section + "]");
        kvs.emplace_back(key, value);
        break;
      }
    }
  }
  return cf;
}

const std::vector<std::pair<std::string, std::string>>* ConfigFile::find_section(
    const std::string& section) const {
  for (const auto& [name, kvs] : data_)
    if (name == section) return &kvs;
  return nullptr;
}

bool ConfigFile::has_section(const std::string& section) const {
  return find_section(section) != nullptr;
}

std::vector<std::string> ConfigFile::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, kvs] : data_) out.push_back(name);
  return out;
}

std::optional<std::string> ConfigFile::get(const std::string& section,
                                           const std::string& key) const {
  const auto* kvs = find_section(section);
  if (!kvs) return std::nullopt;
  for (const auto& [k, v] : *kvs)
    if (k == key) return v;
  return std::nullopt;
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  auto v = get(section, key);
  return v ? *v : fallback;
}

std::string ConfigFile::require(const std::string& section, const std::string& key) const {
  auto v = get(section, key);
  check_arg(v.has_value(), "config: missing required key '" + key + "' in [" + section + "]");
  return *v;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  auto v = get(section, key);
  return v ? parse_double_list(*v).front() : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
  auto v = get(section, key);
  return v ? std::stoi(*v) : fallback;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw InvalidArgument("config: expected boolean for " + key + ", got '" + *v + "'");
}

std::vector<double> ConfigFile::get_doubles(const std::string& section, const std::string& key,
                                            std::vector<double> fallback) const {
  auto v = get(section, key);
  return v ? parse_double_list(*v) : fallback;
}

std::vector<int> ConfigFile::get_ints(const std::string& section, const std::string& key,
                                      std::vector<int> fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  std::vector<int> out;
  for (double d : parse_double_list(*v)) out.push_back(static_cast<int>(d));
  return out;
}

void ConfigFile::restrict_keys(const std::string& section,
                               const std::vector<std::string>& allowed) const {
  const auto* kvs = find_section(section);
  if (!kvs) return;
  for (const auto& [k, v] : *kvs)
    check_arg(std::find(allowed.begin(), allowed.end(), k) != allowed.end(),
              "config: unknown key '" + k + "' in [" + section + "]");
}

void ConfigFile::restrict_sections(const std::vector<std::string>& allowed_exact,
                                   const std::vector<std::string>& allowed_prefixes) const {
  for (const auto& [name, kvs] : data_) {
    bool ok = std::find(allowed_exact.begin(), allowed_exact.end(), name) != allowed_exact.end();
    for (const auto& p : allowed_prefixes)
      if (!ok && name.rfind(p, 0) == 0) ok = true;
    check_arg(ok, "config: unknown section [" + name + "]");
  }
}

}  // namespace swjc
