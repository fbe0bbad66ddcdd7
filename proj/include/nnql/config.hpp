#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nnql {

/// Invalid configuration; `field` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Flat `key = value` configuration. Dotted keys group related settings,
/// `#` starts a comment, blank lines are ignored.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, std::string value);
  bool has(const std::string& key) const { return entries_.contains(key); }
  void erase(const std::string& key) { entries_.erase(key); }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, std::string fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::uint64_t> get_u64s(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Hash of the sorted entries, independent of line order. Keys listed in
  /// `excluded` do not contribute.
  std::uint64_t hash(const std::vector<std::string>& excluded = {}) const;
  std::string hash_hex(const std::vector<std::string>& excluded = {}) const;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace nnql
