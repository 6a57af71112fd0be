#pragma once

#include <map>
#include <string>
#include <vector>

namespace uvg {

/// Flat key=value experiment file. Keys are validated against a fixed
/// schema; '#' starts a comment. Unset keys fall back to defaults, some of
/// which depend on task.kind (resolved by the experiment layer).
class Config {
 public:
  struct Key {
    std::string name;
    /// Empty when the default depends on the task.
    std::string fallback;
    std::string help;
  };

  static const std::vector<Key>& schema();

  /// Throws ConfigError ("config not found", unknown key, bad line).
  static Config load(const std::string& path);
  static Config parse(const std::string& text, const std::string& origin = "<string>");

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Explicit value, else the schema default; ConfigError if neither.
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

double parse_double(const std::string& key, const std::string& v);
long parse_int(const std::string& key, const std::string& v);
bool parse_bool(const std::string& key, const std::string& v);

}  // namespace uvg
