#include <doctest.h>

#include <sstream>

#include "cognate/bench.hpp"

using namespace cognate::bench;

TEST_CASE("categories use strict thresholds") {
  CHECK(categorize(99.999) == Category::Instantaneous);
  CHECK(categorize(100.0) == Category::Uninterrupted);
  CHECK(categorize(999.0) == Category::Uninterrupted);
  CHECK(categorize(1000.0) == Category::Attention);
  CHECK(categorize(10000.0) == Category::Over);
}

TEST_CASE("summaries use the sample standard deviation") {
  const Timing t = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(t.runs == 4);
  CHECK(t.mean_ms == doctest::Approx(2.5));
  CHECK(t.stddev_ms == doctest::Approx(1.2909944487358056));
  CHECK(summarize({5.0}).stddev_ms == 0.0);
  CHECK(summarize({2.0, 2.0, 2.0}).stddev_ms >= 0.0);
}

TEST_CASE("config parsing") {
  const Config c = parse_config(
      "runs = 3\nseed = 4\n# comment\n[a]\nprogram = p.cog\ndata.image = matrix:2:3\n"
      "data.rows = rows.csv\ndemand_outputs = 2\n[b]\nprogram = /abs/q.cog\n",
      "/base");
  CHECK(c.runs == 3);
  CHECK(c.seed == 4);
  REQUIRE(c.entries.size() == 2);
  CHECK(c.entries[0].program == "/base/p.cog");
  CHECK(c.entries[0].datasets[0].source == "matrix:2:3");
  CHECK(c.entries[0].datasets[1].source == "/base/rows.csv");
  CHECK(c.entries[0].demand_outputs == 2);
  CHECK(c.entries[1].program == "/abs/q.cog");
  CHECK_THROWS_AS(parse_config("[a]\nprogram = p\nwhat = 1\n", "."), ConfigError);
  CHECK_THROWS_AS(parse_config("[a]\n", "."), ConfigError);
  CHECK_THROWS_AS(parse_config("runs = many\n", "."), ConfigError);
}

TEST_CASE("generators") {
  const auto m = generate("m", "matrix:2:3", 1);
  CHECK(cognate::to_string(m.value).size() > 0);
  CHECK(cognate::to_string(generate("m", "matrix:2:3", 1).value) == cognate::to_string(m.value));
  const auto r = generate("r", "records:7", 1);
  CHECK(cognate::to_string(r.value).find("region") != std::string::npos);
  CHECK_THROWS_AS(generate("x", "cube:3", 1), ConfigError);
}

TEST_CASE("failed entries are reported, not fatal") {
  Config c;
  c.runs = 1;
  c.entries.push_back(Entry{"broken", "/nonexistent.cog", {}, 1, 1});
  const auto results = run(c);
  REQUIRE(results.size() == 1);
  CHECK_FALSE(results[0].ok);
  std::ostringstream out;
  print_report(results, out);
  CHECK(out.str().find("FAILED") != std::string::npos);
}
