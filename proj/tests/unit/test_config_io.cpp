#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "cpmmh/config.hpp"
#include "cpmmh/io.hpp"

using namespace cpmmh;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("config parses keys, comments and blank lines") {
  const auto cfg = KeyValueConfig::parse(
      "# experiment settings\n"
      "seed = 42\n"
      "\n"
      "sigma_u_grid = 0:0.25:1  # inline comment\n"
      "label = free text value\n");
  CHECK(cfg.get_u64("seed", 0) == 42);
  CHECK(cfg.get_string("label", "") == "free text value");
  const auto grid = cfg.get_grid("sigma_u_grid", "");
  REQUIRE(grid.size() == 5);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 1.0);
}

TEST_CASE("config round-trip is semantically idempotent") {
  const std::string text = "b = 2\na = one\nc = 0.5,0.75\n";
  const auto cfg = KeyValueConfig::parse(text);
  const auto again = KeyValueConfig::parse(cfg.serialize());
  CHECK(again.serialize() == cfg.serialize());
  CHECK(again.get_string("a", "") == "one");
  CHECK(again.get_u64("b", 0) == 2);
  CHECK(again.get_vector("c", "").size() == 2);
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS(KeyValueConfig::parse("novalue\n"));
  CHECK_THROWS(KeyValueConfig::parse("= 3\n"));
  CHECK_THROWS(KeyValueConfig::parse("a = 1\na = 2\n"));
  const auto cfg = KeyValueConfig::parse("x = abc\n");
  CHECK_THROWS(cfg.get_double("x", 0.0));
  CHECK_THROWS(cfg.get_u64("x", 0));
  CHECK_THROWS(cfg.get_bool("x", false));
}

TEST_CASE("grid ranges land exactly on the endpoint") {
  const auto cfg = KeyValueConfig::parse("g = 0.05:0.025:1\nh = 0:0.25:3.5\n");
  const auto g = cfg.get_grid("g", "");
  REQUIRE(g.size() == 39);
  CHECK(g.back() == 1.0);
  const auto h = cfg.get_grid("h", "");
  REQUIRE(h.size() == 15);
  CHECK(h.back() == 3.5);
  CHECK(h[5] == 1.25);
}

TEST_CASE("unread keys are reported") {
  const auto cfg = KeyValueConfig::parse("known = 1\nmystery = 2\n");
  cfg.get_u64("known", 0);
  const auto unread = cfg.unread_keys();
  REQUIRE(unread.size() == 1);
  CHECK(unread[0] == "mystery");
}

TEST_CASE("load_returns parses the documented format") {
  const auto path = temp_file("returns_ok.csv", "log_return\n0.01\n-0.02\n");
  const auto series = load_returns(path);
  REQUIRE(series.log_returns.size() == 2);
  CHECK(series.log_returns[0] == 0.01);
  CHECK(series.log_returns[1] == -0.02);
  CHECK(series.dates.empty());
}

TEST_CASE("load_returns keeps the optional date column") {
  const auto path =
      temp_file("returns_dates.csv", "date,log_return\n2011-01-02,0.003\n2011-01-03,-0.004\n");
  const auto series = load_returns(path);
  REQUIRE(series.log_returns.size() == 2);
  REQUIRE(series.dates.size() == 2);
  CHECK(series.dates[0] == "2011-01-02");
}

TEST_CASE("load_returns errors name the offending line") {
  const auto nan_path = temp_file("returns_nan.csv", "log_return\n0.01\nnan\n0.02\n");
  CHECK_THROWS_WITH(load_returns(nan_path), Catch::Matchers::ContainsSubstring("line 3"));

  const auto text_path = temp_file("returns_text.csv", "log_return\n0.01\noops\n");
  CHECK_THROWS_WITH(load_returns(text_path), Catch::Matchers::ContainsSubstring("line 3"));

  const auto missing = temp_file("returns_missing.csv", "return\n0.01\n");
  CHECK_THROWS_WITH(load_returns(missing), Catch::Matchers::ContainsSubstring("log_return"));

  const auto empty = temp_file("returns_empty.csv", "");
  CHECK_THROWS(load_returns(empty));

  CHECK_THROWS(load_returns(std::filesystem::path("/nonexistent/returns.csv")));
}

TEST_CASE("returns written by the generator load back exactly") {
  const auto path = std::filesystem::temp_directory_path() / "returns_roundtrip.csv";
  const std::vector<double> values{0.0123456789012345678, -4.4e-5, 1.0 / 3.0};
  write_returns_csv(path, values);
  const auto series = load_returns(path);
  REQUIRE(series.log_returns.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(series.log_returns[i] == values[i]);  // %.17g round-trips doubles
  }
}

TEST_CASE("trace CSV carries the documented header and rows") {
  ChainTrace trace(2, 3);
  trace.record(0, std::vector<double>{0.1, -0.2}, -2.5, true, MoveKind::local, 0.8);
  trace.record(1, std::vector<double>{0.1, -0.2}, -2.5, false, MoveKind::global, 0.3);
  trace.record(2, std::vector<double>{0.4, 0.5}, -1.0, true, MoveKind::local, 1.0);
  const auto path = std::filesystem::temp_directory_path() / "trace_test.csv";
  write_trace_csv(path, trace);

  std::ifstream in(path);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  CHECK(header == "iter,theta_1,theta_2,phi,accepted,move_kind,alpha_prob");
  CHECK(row1 == "1,0.10000000000000001,-0.20000000000000001,-2.5,1,local,0.80000000000000004");
  CHECK_THAT(row2, Catch::Matchers::ContainsSubstring(",0,global,"));
}
