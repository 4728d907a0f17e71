#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "photonstore/model.hpp"

namespace photonstore {

/// Parse or semantic error anchored at a config line.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Line-oriented `key = value` text; `[section]` headers prefix later keys as
/// `section.key`.  `#` and `;` start comments.
class Config {
 public:
  static Config parse(std::string_view text, std::string source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  RVec numbers(const std::string& key, const RVec& fallback) const;

  /// Programmatic override (sweeps, command-line); anchored as `<override>`.
  void set(const std::string& key, const std::string& value);
  /// "source:line" of the key's definition.
  std::string where(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  std::vector<std::string> keys() const;
  const std::string& source() const { return source_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;
  std::string source_ = "<config>";
};

}  // namespace photonstore
