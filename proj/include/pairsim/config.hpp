#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pairsim {

/// Flat `key = value` configuration with dotted keys. Blank lines and lines
/// starting with '#' are ignored. Every accessor throws ConfigError naming the
/// key on malformed values.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& is, const std::string& source = "<config>");
  static KeyValueConfig parse_text(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  /// `key=value`, as given on the command line.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<int> get_ints(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  /// Keys present in the file but never read.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

}  // namespace pairsim
