#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace facepix {

// Flat key=value configuration file. '#' starts a comment, blank lines are
// skipped, later keys override earlier ones.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get(const std::string& key, const std::string& fallback) const;
  double get(const std::string& key, double fallback) const;
  int get(const std::string& key, int fallback) const;
  std::int64_t get(const std::string& key, std::int64_t fallback) const;
  bool get_flag(const std::string& key, bool fallback) const;
  std::optional<double> get_optional(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace facepix
