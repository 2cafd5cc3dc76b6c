#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "bata/core/error.hpp"

namespace bata::io {

/// `key = value` lines; `#` starts a comment. Later keys override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& origin = "config") {
    KeyValueConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      require(eq != std::string::npos, ErrorCode::invalid_argument,
              origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
      require(!key.empty() && !value.empty(), ErrorCode::invalid_argument,
              origin + ":" + std::to_string(lineno) + ": empty key or value");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::io_failure, "cannot open config " + path.string());
    return parse(in, path.string());
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  /// Assigns the parsed number to `target` when the key is present.
  template <class T>
  void get(const std::string& key, T& target) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return;
    try {
      std::size_t used = 0;
      if constexpr (std::is_integral_v<T>)
        target = static_cast<T>(std::stoll(it->second, &used));
      else
        target = static_cast<T>(std::stod(it->second, &used));
      require(used == it->second.size(), ErrorCode::invalid_argument, "trailing characters");
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, "config key '" + key + "': cannot parse '" + it->second + "'");
    }
  }

  std::string get_string(const std::string& key, const std::string& fallback = {}) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace bata::io
