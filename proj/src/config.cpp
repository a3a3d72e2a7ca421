#include "torsion/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace torsion {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  int dots = 0;
  for (char c : key) {
    if (c == '.') {
      ++dots;
      continue;
    }
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      return false;
  }
  return dots <= 1 && key.front() != '.' && key.back() != '.';
}

[[noreturn]] void bad_line(const std::string& origin, int line_no,
                           const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line_no << ": " << what;
  throw std::invalid_argument(msg.str());
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

KeyValueConfig KeyValueConfig::parse_text(std::string_view text,
                                          const std::string& origin) {
  KeyValueConfig cfg;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                      : nl - pos);
    ++line_no;
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;

    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      bad_line(origin, line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!valid_key(key))
      bad_line(origin, line_no, "invalid key '" + key + "'");
    if (value.empty()) bad_line(origin, line_no, "empty value for '" + key + "'");
    if (cfg.items_.count(key))
      bad_line(origin, line_no, "duplicate key '" + key + "'");
    cfg.items_[key] = value;
  }
  return cfg;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw std::invalid_argument("invalid key '" + key + "'");
  items_[key] = value;
}

void KeyValueConfig::set_double(const std::string& key, double value) {
  set(key, format_double(value));
}

bool KeyValueConfig::has(const std::string& key) const {
  return items_.count(key) != 0;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = items_.find(key);
  if (it == items_.end())
    throw std::invalid_argument("missing config key '" + key + "'");
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  auto it = items_.find(key);
  return it == items_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0')
    throw std::invalid_argument("config key '" + key +
                                "' is not a number: '" + raw + "'");
  return v;
}

double KeyValueConfig::get_double(const std::string& key,
                                  double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  const std::string raw = get_string(key);
  char* end = nullptr;
  const long long v = std::strtoll(raw.c_str(), &end, 10);
  if (end == raw.c_str() || *end != '\0')
    throw std::invalid_argument("config key '" + key +
                                "' is not an integer: '" + raw + "'");
  return v;
}

std::int64_t KeyValueConfig::get_int(const std::string& key,
                                     std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key) const {
  const std::string raw = get_string(key);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw.c_str(), &end, 10);
  if (end == raw.c_str() || *end != '\0')
    throw std::invalid_argument("config key '" + key +
                                "' is not an unsigned integer: '" + raw + "'");
  return v;
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key,
                                       std::uint64_t fallback) const {
  return has(key) ? get_uint(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  std::string raw = get_string(key);
  std::transform(raw.begin(), raw.end(), raw.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (raw == "true" || raw == "1" || raw == "on" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "off" || raw == "no")
    return false;
  throw std::invalid_argument("config key '" + key +
                              "' is not a boolean: '" + raw + "'");
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::string KeyValueConfig::canonical_text() const {
  std::ostringstream out;
  for (const auto& [key, value] : items_) out << key << " = " << value << "\n";
  return out.str();
}

void KeyValueConfig::apply_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must be KEY=VALUE: '" + assignment +
                                "'");
  const std::string key = trim(std::string_view(assignment).substr(0, eq));
  const std::string value = trim(std::string_view(assignment).substr(eq + 1));
  if (!valid_key(key))
    throw std::invalid_argument("override has invalid key: '" + assignment +
                                "'");
  if (value.empty())
    throw std::invalid_argument("override has empty value: '" + assignment +
                                "'");
  items_[key] = value;
}

}  // namespace torsion
