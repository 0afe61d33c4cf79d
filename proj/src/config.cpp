#include "pairsim/config.hpp"

#include "pairsim/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace pairsim {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::logic_error&) {
  }
  throw ConfigError(key, "expected a number, got '" + v + "'");
}

long long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used == v.size()) return x;
  } catch (const std::logic_error&) {
  }
  throw ConfigError(key, "expected an integer, got '" + v + "'");
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& is, const std::string& source) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno), "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno), "empty key");
    cfg.entries_[key] = trim(t.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  return parse(in, path);
}

void KeyValueConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
    throw ConfigError("--override", "expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.contains(key); }

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  used_.insert(key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? to_double(key, *v) : fallback;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto v = get(key);
  return v ? static_cast<int>(to_integer(key, *v)) : fallback;
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key, std::uint64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const long long x = to_integer(key, *v);
  if (x < 0) throw ConfigError(key, "expected a non-negative integer");
  return static_cast<std::uint64_t>(x);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + *v + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  if (const auto v = get(key))
    for (const auto& tok : split_list(*v)) out.push_back(to_double(key, tok));
  return out;
}

std::vector<int> KeyValueConfig::get_ints(const std::string& key) const {
  std::vector<int> out;
  if (const auto v = get(key))
    for (const auto& tok : split_list(*v)) out.push_back(static_cast<int>(to_integer(key, tok)));
  return out;
}

std::vector<std::string> KeyValueConfig::get_strings(const std::string& key) const {
  const auto v = get(key);
  return v ? split_list(*v) : std::vector<std::string>{};
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (!used_.contains(k)) out.push_back(k);
  return out;
}

}  // namespace pairsim
