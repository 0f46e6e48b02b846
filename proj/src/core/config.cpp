#include "adversarl/core/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "adversarl/core/errors.hpp"

namespace adversarl {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::span<const ConfigKey> schema,
                                     const std::string& origin) {
  KeyValueConfig cfg(schema);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string_view::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected `key = value`");
    }
    try {
      cfg.set(line);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path, std::span<const ConfigKey> schema) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), schema, path.string());
}

void KeyValueConfig::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override `" + std::string(assignment) + "` is not of the form key=value");
  }
  set(std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))));
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (find_key(key) == nullptr) throw ConfigError("unknown config key `" + key + "`");
  values_[key] = value;
}

const ConfigKey* KeyValueConfig::find_key(std::string_view name) const {
  auto it = std::find_if(schema_.begin(), schema_.end(), [&](const ConfigKey& k) { return k.name == name; });
  return it == schema_.end() ? nullptr : &*it;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const ConfigKey* k = find_key(key);
  if (k == nullptr) throw ContractViolation("config key `" + key + "` is not in the schema");
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  if (!k->default_value.empty()) return std::string(k->default_value);
  return std::nullopt;
}

std::string KeyValueConfig::raw(const std::string& key) const {
  auto v = get(key);
  if (!v) throw ConfigError("config key `" + key + "` has no value");
  return *v;
}

std::string KeyValueConfig::get_string(const std::string& key) const { return raw(key); }

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string v = raw(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key `" + key + "`: `" + v + "` is not a number");
  }
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  const std::string v = raw(key);
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("config key `" + key + "`: `" + v + "` is not an integer");
  }
  return out;
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  const std::string v = raw(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key `" + key + "`: `" + v + "` is not a boolean");
}

std::string KeyValueConfig::render() const {
  std::ostringstream os;
  for (const ConfigKey& k : schema_) {
    const auto v = get(std::string(k.name));
    if (v) os << k.name << " = " << *v << '\n';
  }
  return os.str();
}

}  // namespace adversarl
