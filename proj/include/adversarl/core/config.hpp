#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace adversarl {

/// Documentation entry for one accepted configuration key.
struct ConfigKey {
  std::string_view name;
  std::string_view default_value;  // empty: derived from other keys
  std::string_view description;
};

/// Flat `key = value` configuration. Blank lines and `#` comments are
/// ignored. Keys outside the schema are rejected.
class KeyValueConfig {
 public:
  explicit KeyValueConfig(std::span<const ConfigKey> schema) : schema_(schema) {}

  static KeyValueConfig parse(std::string_view text, std::span<const ConfigKey> schema,
                              const std::string& origin = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path, std::span<const ConfigKey> schema);

  /// Applies `key=value`; later calls win.
  void set(std::string_view assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> get(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  /// Every schema key with its effective value, one `key = value` per line.
  std::string render() const;

  const std::map<std::string, std::string>& explicit_values() const { return values_; }
  std::span<const ConfigKey> schema() const { return schema_; }

 private:
  const ConfigKey* find_key(std::string_view name) const;
  std::string raw(const std::string& key) const;

  std::span<const ConfigKey> schema_;
  std::map<std::string, std::string> values_;
};

}  // namespace adversarl
