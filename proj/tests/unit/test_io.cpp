#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"

#include "driftbound/config.hpp"
#include "driftbound/sample_set.hpp"

using namespace driftbound;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "driftbound_io_tests";
  fs::create_directories(dir);
  return dir / name;
}
void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }
}  // namespace

TEST_CASE("key-value config parsing") {
  KeyValueConfig c = KeyValueConfig::parse(
      "top = 1\n"
      "# comment line\n"
      "[fig1a]\n"
      "  deltas = 0.25, 0.5 ,1   ; trailing comment\n"
      "samples=200\n"
      "\n"
      "[ fig1b ]\n"
      "N = 10,30\n");
  CHECK(c.section("").at("top") == "1");
  CHECK(c.has_section("fig1a"));
  CHECK(c.has_section("fig1b"));
  CHECK_FALSE(c.has_section("zzp_check"));
  CHECK(c.section("zzp_check").empty());
  const auto& s = c.section("fig1a");
  CHECK(get_double_list(s, "deltas", {}) == std::vector<double>{0.25, 0.5, 1.0});
  CHECK(get_int(s, "samples", 0) == 200);
  CHECK(get_int(s, "missing", 7) == 7);
  CHECK(get_int_list(c.section("fig1b"), "N", {}) == std::vector<std::int64_t>{10, 30});
  CHECK_THROWS_AS(KeyValueConfig::parse("[open\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse(" = 3\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::load(scratch("does_not_exist.ini")), ConfigError);
}

TEST_CASE("typed value parsing") {
  CHECK(parse_double(" 1e-3 ", "k") == 1e-3);
  CHECK(parse_int("-12", "k") == -12);
  CHECK(parse_u64("18446744073709551615", "k") == 18446744073709551615ull);
  CHECK(trim("  a b \t") == "a b");
  CHECK_THROWS_AS(parse_double("1.5x", "k"), ConfigError);
  CHECK_THROWS_AS(parse_double("", "k"), ConfigError);
  CHECK_THROWS_AS(parse_int("2.5", "k"), ConfigError);
  CHECK_THROWS_AS(parse_u64("-1", "k"), ConfigError);
  CHECK_THROWS_AS(parse_double_list(" , ", "k"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_int("abc", "samples"), doctest::Contains("samples"), ConfigError);
}

TEST_CASE("sample CSV roundtrip is exact") {
  Rng rng(1);
  SampleSet s{Matrix(50, 3), "cloud", 5};
  for (Eigen::Index i = 0; i < 50; ++i)
    for (int j = 0; j < 3; ++j) s.points(i, j) = rng.normal() * std::pow(10.0, j - 1);
  const fs::path p = scratch("cloud.csv");
  write_csv(s, p);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == "index,x0,x1,x2");
  SampleSet back = read_sample_csv(p);
  CHECK(back.label == "cloud");
  CHECK(back.points == s.points);
  CHECK(read_sample_csv(p, "renamed").label == "renamed");
}

TEST_CASE("sample CSV reader ignores non-coordinate columns and rejects malformed files") {
  const fs::path trace = scratch("trace.csv");
  write_text(trace, "time,x0,x1,v0,v1\n0,1,2,1,-1\n0.5,1.5,1.5,1,-1\n");
  SampleSet t = read_sample_csv(trace);
  CHECK(t.dim() == 2);
  CHECK(t.size() == 2);
  CHECK(t.points(1, 0) == 1.5);

  const fs::path ragged = scratch("ragged.csv");
  write_text(ragged, "index,x0,x1\n0,1\n");
  CHECK_THROWS_AS(read_sample_csv(ragged), ConfigError);
  const fs::path nocoord = scratch("nocoord.csv");
  write_text(nocoord, "index,a,b\n0,1,2\n");
  CHECK_THROWS_AS(read_sample_csv(nocoord), ConfigError);
  const fs::path text = scratch("text.csv");
  write_text(text, "index,x0\n0,abc\n");
  CHECK_THROWS_AS(read_sample_csv(text), ConfigError);
  const fs::path empty = scratch("empty.csv");
  write_text(empty, "");
  CHECK_THROWS_AS(read_sample_csv(empty), ConfigError);
  const fs::path header_only = scratch("header_only.csv");
  write_text(header_only, "index,x0\n");
  CHECK_THROWS_AS(read_sample_csv(header_only), InvalidArgument);
  CHECK_THROWS_AS(read_sample_csv(scratch("missing.csv")), ConfigError);
}

TEST_CASE("sample set validation and row selection") {
  SampleSet s{Matrix(3, 2), "s", 1};
  s.points << 1, 2, 3, 4, 5, 6;
  SampleSet r = s.rows({2, 0}, "sub");
  CHECK(r.label == "sub");
  CHECK(r.points(0, 1) == 6);
  CHECK(r.points(1, 0) == 1);
  CHECK_NOTHROW(s.validate());
  s.points(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  CHECK_THROWS_AS(SampleSet{}.validate(), InvalidArgument);
}
