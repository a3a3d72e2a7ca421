#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace torsion {

std::uint64_t fnv1a64(std::string_view text);
std::string to_hex(std::uint64_t value);
std::string format_double(double value);  // round-trip precision, %.17g

// Flat key = value configuration with dotted section names, one level deep.
// Lines: blank, '#' comments, or "section.key = value".
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  // Throws std::invalid_argument naming the offending line on bad input.
  static KeyValueConfig parse_text(std::string_view text,
                                   const std::string& origin = "<text>");

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  bool has(const std::string& key) const;
  std::size_t size() const { return items_.size(); }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Sorted key = value lines, the canonical form used for digests and for
  // the output-file header echo.
  std::string canonical_text() const;
  const std::map<std::string, std::string>& items() const { return items_; }

  // Applies "KEY=VALUE" overrides, e.g. from repeated --set flags.
  void apply_override(const std::string& assignment);

 private:
  std::map<std::string, std::string> items_;
};

}  // namespace torsion
