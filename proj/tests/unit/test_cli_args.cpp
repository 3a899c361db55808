#include <doctest.h>

#include <atomic>

#include "cli_args.hpp"

using namespace mems4;
using namespace mems4::cli;

TEST_CASE("integer ranges") {
  CHECK(parse_int_range("17..30").lo == 17);
  CHECK(parse_int_range("17..30").hi == 30);
  CHECK(parse_int_range("4").hi == 4);
  CHECK_THROWS_AS(parse_int_range("30..17"), std::invalid_argument);
  CHECK_THROWS_AS(parse_int_range("a..b"), std::invalid_argument);
  CHECK_THROWS_AS(parse_int_range("3.5"), std::invalid_argument);
  CHECK(parse_int_list("2,3,9..11") == std::vector<int>{2, 3, 9, 10, 11});
}

TEST_CASE("grids") {
  const auto g = parse_grid("1:3:9");
  REQUIRE(g.size() == 9);
  CHECK(g[0] == 1);
  CHECK(g[1] == Rational(5, 4));
  CHECK(g[8] == 3);
  const auto b = parse_grid("0.1:2:20");
  REQUIRE(b.size() == 20);
  CHECK(b[0] == Rational(1, 10));
  CHECK(b[19] == 2);
  CHECK(parse_grid("0:0:1") == std::vector<Rational>{0});
  CHECK(parse_grid("1:3:0").empty());
  CHECK(parse_grid("3") == std::vector<Rational>{3});
  CHECK(parse_grid("1/2, 3") == std::vector<Rational>{Rational(1, 2), 3});
  CHECK_THROWS_AS(parse_grid("1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1:2:-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
}

TEST_CASE("lambda specs") {
  CHECK(parse_lambda_spec("auto").automatic);
  const auto s = parse_lambda_spec("1:10:10");
  CHECK(s.values.size() == 10);
  CHECK(s.values.back() == 10.0);
  CHECK_THROWS_AS(parse_lambda_spec("3,1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_lambda_spec("-1"), std::invalid_argument);
}

TEST_CASE("output root precedence") {
  CHECK(output_root(std::string("flag"), std::string("cfg"), "env", "def") == "flag");
  CHECK(output_root(std::nullopt, std::string("cfg"), "env", "def") == "cfg");
  CHECK(output_root(std::nullopt, std::nullopt, "env", "def") == "env");
  CHECK(output_root(std::nullopt, std::nullopt, "", "def") == "def");
  CHECK(output_root(std::nullopt, std::nullopt, nullptr, "def") == "def");
}

TEST_CASE("exit codes") {
  CHECK(exit_code(CertStatus::verified) == 0);
  CHECK(exit_code(CertStatus::falsified) == 1);
  CHECK(exit_code(CertStatus::inconclusive) == 2);
}

TEST_CASE("parallel_for visits every index once and propagates errors") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  CHECK_NOTHROW(parallel_for(0, 4, [](std::size_t) {}));
}
