#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "torsion/config.hpp"
#include "torsion/rng.hpp"
#include "torsion/series_io.hpp"

using namespace torsion;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("torsion_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

TimeSeries random_series(std::uint64_t seed, std::size_t n) {
  TimeSeries ts;
  ts.dt = 0.05;
  ts.channel = Channel::IntegratorTorque;
  ts.seed = seed;
  ts.fingerprint = 0xdeadbeefcafe1234ULL;
  Rng rng(seed);
  ts.values.resize(n);
  for (auto& v : ts.values) v = 1e-7 * rng.normal();
  return ts;
}

}  // namespace

TEST_CASE("config: parse, types, overrides, canonical form") {
  const char* text =
      "# a comment\n"
      "\n"
      "pendulum.inertia = 1.5\n"
      "sim.seed = 42\n"
      "sim.noise = off\n"
      "output.prefix = run_a\n";
  KeyValueConfig cfg = KeyValueConfig::parse_text(text, "inline");
  CHECK(cfg.get_double("pendulum.inertia") == 1.5);
  CHECK(cfg.get_uint("sim.seed") == 42);
  CHECK(cfg.get_bool("sim.noise") == false);
  CHECK(cfg.get_string("output.prefix") == "run_a");
  CHECK(cfg.get_double("missing.key", 7.5) == 7.5);
  CHECK_THROWS_AS(cfg.get_double("missing.key"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.get_double("output.prefix"), std::invalid_argument);

  cfg.apply_override("sim.seed=43");
  CHECK(cfg.get_uint("sim.seed") == 43);
  CHECK_THROWS_AS(cfg.apply_override("nonsense"), std::invalid_argument);

  const std::string canon = cfg.canonical_text();
  const KeyValueConfig reparsed = KeyValueConfig::parse_text(canon);
  CHECK(reparsed.canonical_text() == canon);
}

TEST_CASE("config: malformed input names the offending line") {
  try {
    KeyValueConfig::parse_text("a.b = 1\nthis is wrong\n", "bad.cfg");
    FAIL("expected parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("bad.cfg:2") != std::string::npos);
  }
  CHECK_THROWS_AS(KeyValueConfig::parse_text("a.b.c = 1\n"),
                  std::invalid_argument);  // too deep
  CHECK_THROWS_AS(KeyValueConfig::parse_text("a = 1\na = 2\n"),
                  std::invalid_argument);  // duplicate
  CHECK_THROWS_AS(KeyValueConfig::parse_text("a =\n"),
                  std::invalid_argument);  // empty value
}

TEST_CASE("fnv1a64 digest is stable") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(to_hex(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
}

TEST_CASE("timeseries text round trip preserves values exactly") {
  TempDir dir;
  const TimeSeries ts = random_series(9, 257);
  KeyValueConfig echo;
  echo.set("sim.mode", "feedback");
  echo.set("sim.seed", "9");
  write_timeseries_text(ts, echo, dir.file("series.txt"));

  KeyValueConfig header;
  const TimeSeries back = read_timeseries_text(dir.file("series.txt"), &header);
  CHECK(back.dt == ts.dt);
  CHECK(back.channel == ts.channel);
  CHECK(back.seed == ts.seed);
  CHECK(back.fingerprint == ts.fingerprint);
  REQUIRE(back.values.size() == ts.values.size());
  for (std::size_t i = 0; i < ts.values.size(); ++i)
    CHECK(back.values[i] == ts.values[i]);
  CHECK(header.get_string("sim.mode") == "feedback");
}

TEST_CASE("timeseries binary round trip preserves values exactly") {
  TempDir dir;
  const TimeSeries ts = random_series(10, 1023);
  write_timeseries_binary(ts, dir.file("series.bin"));
  const TimeSeries back = read_timeseries_binary(dir.file("series.bin"));
  CHECK(back.dt == ts.dt);
  CHECK(back.channel == ts.channel);
  CHECK(back.seed == ts.seed);
  CHECK(back.fingerprint == ts.fingerprint);
  REQUIRE(back.values.size() == ts.values.size());
  for (std::size_t i = 0; i < ts.values.size(); ++i)
    CHECK(back.values[i] == ts.values[i]);
}

TEST_CASE("timeseries text reader flags corruption with the line number") {
  TempDir dir;
  const TimeSeries ts = random_series(11, 8);
  write_timeseries_text(ts, {}, dir.file("ok.txt"));

  // corrupt one header line
  std::ifstream in(dir.file("ok.txt"));
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  in.close();
  const std::string needle = "# dt = ";
  content.replace(content.find(needle), needle.size(), "# dt = not_a_number ");
  std::ofstream out(dir.file("corrupt.txt"));
  out << content;
  out.close();
  try {
    read_timeseries_text(dir.file("corrupt.txt"));
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("corrupt.txt:3") != std::string::npos);
  }

  // bad sample line
  std::ofstream bad(dir.file("bad_sample.txt"));
  bad << "# torsion-timeseries 1\n# channel = Angle\n# dt = 0.1\n"
      << "# seed = 0\n# fingerprint = 0\n1.0\noops\n";
  bad.close();
  try {
    read_timeseries_text(dir.file("bad_sample.txt"));
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("bad_sample.txt:7") !=
          std::string::npos);
  }

  // count mismatch
  std::ofstream short_file(dir.file("short.txt"));
  short_file << "# torsion-timeseries 1\n# channel = Angle\n# dt = 0.1\n"
             << "# seed = 0\n# fingerprint = 0\n# n_samples = 3\n1.0\n2.0\n";
  short_file.close();
  CHECK_THROWS_AS(read_timeseries_text(dir.file("short.txt")),
                  std::runtime_error);

  CHECK_THROWS_AS(read_timeseries_text(dir.file("does_not_exist.txt")),
                  std::runtime_error);
}

TEST_CASE("columns writer produces parseable plot data") {
  TempDir dir;
  KeyValueConfig echo;
  echo.set("model.kind", "free_angle_psd");
  write_columns_text(dir.file("curve.txt"), echo, {"frequency", "density"},
                     {{1.0, 2.0, 3.0}, {0.1, 0.2, 0.3}});
  std::ifstream in(dir.file("curve.txt"));
  std::string line;
  int data_rows = 0;
  bool saw_config = false;
  while (std::getline(in, line)) {
    if (line.rfind("# config.model.kind", 0) == 0) saw_config = true;
    if (!line.empty() && line.front() != '#') ++data_rows;
  }
  CHECK(saw_config);
  CHECK(data_rows == 3);

  CHECK_THROWS_AS(
      write_columns_text(dir.file("x.txt"), echo, {"a", "b"},
                         {{1.0}, {1.0, 2.0}}),
      std::invalid_argument);
}
