#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace lgeo::io {

/// Flat "key = value" text. '#' starts a comment; blank lines are ignored.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  /// ConfigError for any key outside `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated reals.
  std::vector<double> get_doubles(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, std::size_t> lines_;
};

}  // namespace lgeo::io
