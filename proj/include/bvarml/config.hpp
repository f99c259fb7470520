#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvarml {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat TOML-style key-value configuration: [section] headers, `key = value`
// lines, # comments, quoted strings, numbers, booleans and simple arrays.
// Keys are stored dotted (section.key). The digest is order-independent.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

  std::uint64_t digest() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace bvarml
