#include "photonstore/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace photonstore {

namespace {
std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

bool to_double(const std::string& s, double& v) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(v);
}
}  // namespace

Config Config::parse(std::string_view text, std::string source) {
  Config c;
  c.source_ = std::move(source);
  std::string section;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    auto bad = [&](const std::string& msg) {
      throw ConfigError(c.source_ + ":" + std::to_string(lineno) + ": " + msg);
    };
    if (line.front() == '[') {
      if (line.back() != ']') bad("unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!valid_name(section)) bad("bad section name '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad("expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!valid_name(key)) bad("bad key '" + key + "'");
    if (value.empty()) bad("empty value for '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (c.entries_.count(full)) bad("duplicate key '" + full + "' (first set at line " +
                                    std::to_string(c.entries_.at(full).line) + ")");
    c.entries_[full] = Entry{value, lineno};
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path.string() + ": cannot open config");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path.string());
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second.value;
}

double Config::number(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  double v = 0.0;
  if (!to_double(it->second.value, v)) fail(key, "'" + it->second.value + "' is not a finite number");
  return v;
}

std::size_t Config::count(const std::string& key, std::size_t fallback) const {
  if (!has(key)) return fallback;
  const double v = number(key, 0.0);
  if (v < 0.0 || v != std::floor(v) || v > 1e9) fail(key, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

RVec Config::numbers(const std::string& key, const RVec& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  RVec out;
  std::string cur;
  std::istringstream in(it->second.value);
  while (std::getline(in, cur, ',')) {
    const std::string t = trim(cur);
    double v = 0.0;
    if (!to_double(t, v)) fail(key, "list item '" + t + "' is not a finite number");
    out.push_back(v);
  }
  if (out.empty()) fail(key, "empty list");
  return out;
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = Entry{value, 0}; }

std::string Config::where(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return source_;
  if (it->second.line == 0) return "<override>";
  return source_ + ":" + std::to_string(it->second.line);
}

void Config::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(where(key) + ": " + key + ": " + message);
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, e] : entries_) out.push_back(k);
  return out;
}

}  // namespace photonstore
