#include "torsion/series_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace torsion {

namespace {

constexpr char text_magic[] = "torsion-timeseries 1";
constexpr char binary_magic[8] = {'T', 'P', 'D', 'L', 'T', 'S', '0', '1'};

[[noreturn]] void parse_error(const std::string& path, int line_no,
                              const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line_no << ": " << what;
  throw std::runtime_error(msg.str());
}

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(std::begin(bytes), std::end(bytes));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw std::runtime_error("binary series truncated");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(std::begin(bytes), std::end(bytes));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void write_header(std::ostream& out, const TimeSeries& ts,
                  const KeyValueConfig& echo) {
  out << "# " << text_magic << "\n";
  out << "# channel = " << channel_name(ts.channel) << "\n";
  out << "# dt = " << format_double(ts.dt) << "\n";
  out << "# seed = " << ts.seed << "\n";
  out << "# fingerprint = " << to_hex(ts.fingerprint) << "\n";
  for (const auto& [key, value] : echo.items())
    out << "# config." << key << " = " << value << "\n";
  out << "# n_samples = " << ts.values.size() << "\n";
}

}  // namespace

void write_timeseries_text(const TimeSeries& ts, const KeyValueConfig& echo,
                           const std::string& path) {
  ts.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_header(out, ts, echo);
  for (double v : ts.values) out << format_double(v) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

TimeSeries read_timeseries_text(const std::string& path,
                                KeyValueConfig* header_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  TimeSeries ts;
  KeyValueConfig echo;
  bool magic_seen = false;
  bool have_dt = false, have_channel = false, have_fingerprint = false;
  std::size_t expected = 0;
  bool have_count = false;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.erase(0, 1);
      if (!magic_seen) {
        if (body != text_magic)
          parse_error(path, line_no,
                      "bad format tag, expected '" + std::string(text_magic) +
                          "'");
        magic_seen = true;
        continue;
      }
      const std::size_t eq = body.find('=');
      if (eq == std::string::npos)
        parse_error(path, line_no, "malformed header line");
      std::string key = body.substr(0, eq);
      std::string value = body.substr(eq + 1);
      while (!key.empty() && key.back() == ' ') key.pop_back();
      while (!value.empty() && value.front() == ' ') value.erase(0, 1);
      try {
        if (key == "channel") {
          ts.channel = channel_from_name(value);
          have_channel = true;
        } else if (key == "dt") {
          ts.dt = std::stod(value);
          have_dt = true;
        } else if (key == "seed") {
          ts.seed = std::stoull(value);
        } else if (key == "fingerprint") {
          ts.fingerprint = std::stoull(value, nullptr, 16);
          have_fingerprint = true;
        } else if (key == "n_samples") {
          expected = std::stoull(value);
          have_count = true;
        } else if (key.rfind("config.", 0) == 0) {
          echo.set(key.substr(7), value);
        } else {
          parse_error(path, line_no, "unknown header key '" + key + "'");
        }
      } catch (const std::invalid_argument& e) {
        parse_error(path, line_no, e.what());
      } catch (const std::out_of_range&) {
        parse_error(path, line_no, "value out of range");
      }
      continue;
    }
    if (!magic_seen)
      parse_error(path, line_no, "data before header");
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0')
      parse_error(path, line_no, "bad sample '" + line + "'");
    ts.values.push_back(v);
  }
  if (!magic_seen) parse_error(path, 1, "missing header");
  if (!have_channel || !have_dt || !have_fingerprint)
    parse_error(path, line_no, "incomplete header");
  if (have_count && ts.values.size() != expected)
    parse_error(path, line_no,
                "sample count mismatch: header says " +
                    std::to_string(expected) + ", file has " +
                    std::to_string(ts.values.size()));
  ts.validate();
  if (header_out) *header_out = echo;
  return ts;
}

void write_timeseries_binary(const TimeSeries& ts, const std::string& path) {
  ts.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(binary_magic, sizeof(binary_magic));
  put_le<std::uint32_t>(out, 1);  // version
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ts.channel));
  put_le<double>(out, ts.dt);
  put_le<std::uint64_t>(out, ts.seed);
  put_le<std::uint64_t>(out, ts.fingerprint);
  put_le<std::uint64_t>(out, ts.values.size());
  for (double v : ts.values) put_le<double>(out, v);
  if (!out) throw std::runtime_error("write failed: " + path);
}

TimeSeries read_timeseries_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, binary_magic, sizeof(magic)) != 0)
    throw std::runtime_error(path + ": not a torsion binary series");
  const auto version = get_le<std::uint32_t>(in);
  if (version != 1)
    throw std::runtime_error(path + ": unsupported version " +
                             std::to_string(version));
  TimeSeries ts;
  const auto channel = get_le<std::uint32_t>(in);
  if (channel > 2) throw std::runtime_error(path + ": bad channel tag");
  ts.channel = static_cast<Channel>(channel);
  ts.dt = get_le<double>(in);
  ts.seed = get_le<std::uint64_t>(in);
  ts.fingerprint = get_le<std::uint64_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  ts.values.resize(count);
  for (auto& v : ts.values) v = get_le<double>(in);
  ts.validate();
  return ts;
}

void write_columns_text(const std::string& path, const KeyValueConfig& echo,
                        const std::vector<std::string>& column_names,
                        const std::vector<std::vector<double>>& columns) {
  if (columns.empty() || column_names.size() != columns.size())
    throw std::invalid_argument("write_columns_text: bad columns");
  const std::size_t rows = columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows)
      throw std::invalid_argument("write_columns_text: ragged columns");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# torsion-columns 1\n";
  for (const auto& [key, value] : echo.items())
    out << "# config." << key << " = " << value << "\n";
  out << "#";
  for (const auto& name : column_names) out << " " << name;
  out << "\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c ? " " : "") << format_double(columns[c][r]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace torsion
