#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aerocov/scenario.hpp"
#include "commands.hpp"

using namespace aerocov;
using namespace aerocov::cli;

namespace {

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

Scenario quick() {
  Scenario sc = dense_urban_scenario(5, 100);
  sc.num.r_max = 3000;
  sc.num.trials = 500;
  return sc;
}

}  // namespace

TEST_CASE("sweep parsing") {
  const auto s = parse_sweep("threshold_db=-10:30:5");
  CHECK(s.param == SweepParam::threshold_db);
  REQUIRE(s.grid.size() == 9);
  CHECK(s.grid.front() == -10);
  CHECK(s.grid.back() == 30);

  CHECK(parse_sweep("altitude=100:500:100").grid.size() == 5);
  CHECK(parse_sweep("density=9:3:-2").grid == std::vector<double>{9, 7, 5, 3});
  CHECK(parse_sweep("density=0.1:0.3:0.1").grid.size() == 3);
  CHECK(parse_sweep("altitude=100:100:1").grid.size() == 1);

  CHECK_THROWS_AS(parse_sweep("height=1:2:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("altitude=1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("altitude=1:2:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("altitude=3:2:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("altitude=1:x:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("altitude"), std::invalid_argument);
  CHECK_THROWS_AS(parse_mode("fast"), std::invalid_argument);
}

TEST_CASE("coverage: analysis columns identical with and without simulation") {
  RunOptions o;
  o.sweeps = {parse_sweep("threshold_db=-5:5:5")};
  const auto analysis = csv(cmd_coverage(quick(), o).text);
  o.mode = Mode::both;
  const auto both = csv(cmd_coverage(quick(), o).text);
  REQUIRE(analysis.size() == 4);
  REQUIRE(both.size() == 4);
  CHECK(analysis[0][0] == "threshold_db");
  CHECK(analysis[0].size() == 9);
  for (std::size_t r = 1; r < 4; ++r) {
    REQUIRE(analysis[r].size() == 9);
    REQUIRE(both[r].size() == 9);
    for (int c = 0; c < 7; ++c) CHECK(analysis[r][c] == both[r][c]);
    CHECK(analysis[r][7].empty());
    CHECK_FALSE(both[r][7].empty());
    CHECK(std::abs(std::stod(both[r][3]) - std::stod(both[r][7])) < 0.1);
  }
}

TEST_CASE("coverage: product grid rows follow sweep order") {
  RunOptions o;
  o.sweeps = {parse_sweep("altitude=100:200:100"), parse_sweep("threshold_db=0:10:10")};
  const auto rows = csv(cmd_coverage(quick(), o).text);
  REQUIRE(rows.size() == 5);
  CHECK(rows[1][1] == "100");
  CHECK(rows[1][0] == "0");
  CHECK(rows[2][0] == "10");
  CHECK(rows[3][1] == "200");
  o.sweeps.push_back(parse_sweep("altitude=100:100:1"));
  CHECK_THROWS_AS(cmd_coverage(quick(), o), std::invalid_argument);
}

TEST_CASE("rate: megabit column is nats * bandwidth / ln 2") {
  RunOptions o;
  o.sweeps = {parse_sweep("density=3:9:6")};
  const auto rows = csv(cmd_rate(quick(), o).text);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][2] == "rate_nats_per_hz");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double nats = std::stod(rows[r][2]);
    CHECK(std::stod(rows[r][3]) == doctest::Approx(nats * 10.0 / std::numbers::ln2).epsilon(1e-15));
  }
  CHECK(std::stod(rows[1][2]) > std::stod(rows[2][2]));
  o.sweeps = {parse_sweep("threshold_db=0:1:1")};
  CHECK_THROWS_AS(cmd_rate(quick(), o), std::invalid_argument);
}

TEST_CASE("association and simulate") {
  RunOptions o;
  o.mode = Mode::simulation;
  const auto rows = csv(cmd_association(quick(), o).text);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][2].empty());
  CHECK_FALSE(rows[1][4].empty());

  const auto dump = cmd_simulate(quick(), 50, 4);
  CHECK(csv(dump.text).size() == 51);
  CHECK(dump.text == cmd_simulate(quick(), 50, 4).text);
  CHECK(dump.text != cmd_simulate(quick(), 50, 5).text);
}

TEST_CASE("validate rejects small runs and flags a mismatched window") {
  Scenario sc = dense_urban_scenario(5, 100);
  sc.num.r_max = 3000;
  sc.env.m = 1;  // exact fading expansion, so only sampling noise separates the two sides
  ValidateOptions o;
  o.trials = 100;
  CHECK_THROWS_AS(cmd_validate(sc, o), std::invalid_argument);

  o.trials = 10000;
  o.thresholds_db = {-5, 0};
  const auto good = cmd_validate(sc, o);
  CHECK(good.ok);
  CHECK(good.text.find("result: PASS") != std::string::npos);

  o.sim_r_max = 1500;
  const auto bad = cmd_validate(sc, o);
  CHECK_FALSE(bad.ok);
  CHECK(bad.text.find("FAIL coverage_delta@") != std::string::npos);
}
