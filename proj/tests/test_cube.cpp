#include <doctest.h>

#include <functional>
#include <random>

#include "bakery.hpp"
#include "cubewright/cube.hpp"
#include "cubewright/errors.hpp"
#include "oracle.hpp"

using namespace cubewright;

namespace {

std::vector<std::string> members_of(const Cube& cube, const std::string& dim) {
  const Dimension* d = cube.find_dim(dim);
  REQUIRE(d != nullptr);
  return d->members();
}

// Stored cells as (member values, count) in lexicographic coordinate order.
std::vector<std::pair<std::vector<std::string>, std::uint64_t>> listed_cells(const Cube& cube) {
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> out;
  for (const auto& [coord, count] : cube.cells()) {
    std::vector<std::string> values;
    for (std::size_t i = 0; i < coord.size(); ++i) {
      values.push_back(cube.dims()[i].members()[coord[i]]);
    }
    out.emplace_back(std::move(values), count);
  }
  return out;
}

}  // namespace

TEST_CASE("build_cube groups the bakery rows into five stored cells") {
  Cube cube = bakery::cube();
  CHECK(cube.total() == 7);
  REQUIRE(cube.dims().size() == 3);
  CHECK(members_of(cube, "DATE") ==
        std::vector<std::string>{"2011-02-12", "2011-02-13", "2011-03-28", "2011-03-29"});
  CHECK(members_of(cube, "MARITAL_STATUS") ==
        std::vector<std::string>{"SINGLE", "MARRIED", "WIDOWED"});
  CHECK(members_of(cube, "TYPE_OF_CAKE") == std::vector<std::string>{"WEDDING", "VANILLA", "MILKY"});
  CHECK(cube.find_dim("MARITAL_STATUS")->declared());
  CHECK_FALSE(cube.find_dim("DATE")->declared());

  auto cells = listed_cells(cube);
  REQUIRE(cells.size() == 5);
  using Cell = std::pair<std::vector<std::string>, std::uint64_t>;
  CHECK(cells[0] == Cell{{"2011-02-12", "SINGLE", "VANILLA"}, 2});
  CHECK(cells[1] == Cell{{"2011-02-13", "SINGLE", "VANILLA"}, 1});
  CHECK(cells[2] == Cell{{"2011-02-13", "MARRIED", "MILKY"}, 1});
  CHECK(cells[3] == Cell{{"2011-03-28", "SINGLE", "WEDDING"}, 2});
  CHECK(cells[4] == Cell{{"2011-03-29", "SINGLE", "WEDDING"}, 1});
}

TEST_CASE("build_cube small and error cases") {
  Table cleaned = bakery::clean_table();

  SUBCASE("empty table gives an empty cube") {
    Table empty = cleaned;
    empty.rows.clear();
    Cube cube = build_cube(empty, bakery::dimensions());
    CHECK(cube.total() == 0);
    CHECK(cube.cells().empty());
    CHECK(members_of(cube, "DATE").empty());
  }
  SUBCASE("one-row table gives a single cell of count 1") {
    Table one = cleaned;
    one.rows.resize(1);
    Cube cube = build_cube(one, bakery::dimensions());
    REQUIRE(cube.cells().size() == 1);
    CHECK(cube.cells().begin()->second == 1);
  }
  SUBCASE("unknown column") {
    CHECK_THROWS_AS(build_cube(cleaned, {"DATE", "FLAVOUR"}), CubeError);
  }
  SUBCASE("non-categorical column") {
    CHECK_THROWS_AS(build_cube(bakery::raw_table(), {"AGE"}), CubeError);
  }
  SUBCASE("duplicate dimension column") {
    CHECK_THROWS_AS(build_cube(cleaned, {"DATE", "DATE"}), CubeError);
  }
  SUBCASE("declared members for an unknown dimension") {
    CHECK_THROWS_AS(build_cube(cleaned, {"DATE"}, {{"FLAVOUR", {"A"}}}), CubeError);
  }
  SUBCASE("observed value outside a declared list") {
    CHECK_THROWS_AS(build_cube(cleaned, bakery::dimensions(),
                               {{"TYPE_OF_CAKE", {"WEDDING", "VANILLA"}}}),
                    CubeError);
  }
}

TEST_CASE("cell reads stored counts and zero-fills the rest") {
  Cube cube = bakery::cube();
  CHECK(cube.cell({"2011-03-28", "SINGLE", "WEDDING"}) == 2);
  CHECK(cube.cell({"2011-02-12", "MARRIED", "VANILLA"}) == 0);
  CHECK(cube.cell({"2011-02-12", "WIDOWED", "MILKY"}) == 0);
  CHECK(cube.cell({"2011-03-28", "single", " wedding "}) == 2);  // canonicalized lookup
  CHECK_THROWS_AS(cube.cell({"2011-03-28", "SINGLE", "CHEESE"}), CubeError);
  CHECK_THROWS_AS(cube.cell({"2011-03-28", "SINGLE"}), CubeError);

  Table empty = bakery::clean_table();
  empty.rows.clear();
  Cube empty_cube = build_cube(empty, bakery::dimensions());
  CHECK_THROWS_AS(empty_cube.cell({"2011-02-12", "SINGLE", "VANILLA"}), CubeError);
}

TEST_CASE("zero-fill: the dense view has exactly the five grouped counts") {
  Cube cube = bakery::cube();
  auto expected = oracle::group_count(bakery::clean_table(), bakery::dimensions());
  std::size_t nonzero = 0;
  for (const std::string& d : members_of(cube, "DATE")) {
    for (const std::string& m : members_of(cube, "MARITAL_STATUS")) {
      for (const std::string& c : members_of(cube, "TYPE_OF_CAKE")) {
        std::uint64_t count = cube.cell({d, m, c});
        auto it = expected.find({d, m, c});
        CHECK(count == (it == expected.end() ? 0 : it->second));
        if (count > 0) ++nonzero;
      }
    }
  }
  CHECK(nonzero == 5);
}

TEST_CASE("slice fixes one dimension and keeps the other member lists whole") {
  Cube cube = bakery::cube();

  struct GridCase {
    std::string cake;
    std::vector<std::vector<std::uint64_t>> grid;  // marital status x date
  };
  // March dates throughout; the per-cake grids include the all-zero rows.
  std::vector<GridCase> cases = {
      {"VANILLA", {{2, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}},
      {"MILKY", {{0, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 0}}},
      {"WEDDING", {{0, 0, 2, 1}, {0, 0, 0, 0}, {0, 0, 0, 0}}},
  };
  for (const GridCase& c : cases) {
    CAPTURE(c.cake);
    Cube sliced = cube.slice("TYPE_OF_CAKE", c.cake);
    REQUIRE(sliced.dims().size() == 2);
    CHECK(members_of(sliced, "DATE").size() == 4);
    CrossTab ct = sliced.crosstab("MARITAL_STATUS", "DATE");
    CHECK(ct.counts == c.grid);
  }

  SUBCASE("slicing a declared-but-unobserved member yields an all-zero cube") {
    Cube widowed = cube.slice("MARITAL_STATUS", "WIDOWED");
    CHECK(widowed.dims().size() == 2);
    CHECK(widowed.cells().empty());
    CHECK(widowed.total() == 0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(cube.slice("FLAVOUR", "X"), CubeError);
    CHECK_THROWS_AS(cube.slice("TYPE_OF_CAKE", "CHEESE"), CubeError);
  }
}

TEST_CASE("dice restricts member subsets in place") {
  Cube cube = bakery::cube();

  SUBCASE("march dice keeps three orders") {
    Cube diced = cube.dice({{"DATE", {"2011-03-28", "2011-03-29"}}});
    CHECK(diced.total() == 3);
    CHECK(diced.dims().size() == 3);
    CHECK(members_of(diced, "DATE") == std::vector<std::string>{"2011-03-28", "2011-03-29"});
  }
  SUBCASE("member order is the cube's, not the subset's") {
    Cube diced = cube.dice({{"DATE", {"2011-03-29", "2011-02-12"}}});
    CHECK(members_of(diced, "DATE") == std::vector<std::string>{"2011-02-12", "2011-03-29"});
  }
  SUBCASE("dicing with every full member set is the identity") {
    Cube diced = cube.dice({{"DATE", members_of(cube, "DATE")},
                            {"MARITAL_STATUS", members_of(cube, "MARITAL_STATUS")},
                            {"TYPE_OF_CAKE", members_of(cube, "TYPE_OF_CAKE")}});
    CHECK(diced == cube);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(cube.dice({{"DATE", {}}}), CubeError);
    CHECK_THROWS_AS(cube.dice({{"DATE", {"2011-12-25"}}}), CubeError);
    CHECK_THROWS_AS(cube.dice({{"FLAVOUR", {"X"}}}), CubeError);
  }
}

TEST_CASE("dice then slice equals slice then dice") {
  Cube cube = bakery::cube();
  std::map<std::string, std::vector<std::string>> keep{
      {"DATE", {"2011-02-12", "2011-02-13", "2011-03-28"}}};
  Cube a = cube.dice(keep).slice("TYPE_OF_CAKE", "VANILLA");
  Cube b = cube.slice("TYPE_OF_CAKE", "VANILLA").dice(keep);
  CHECK(a == b);

  // both agree with the brute-force filter count
  Table cleaned = bakery::clean_table();
  std::uint64_t expected = oracle::filter_count(
      cleaned, {{"DATE", {"2011-02-12", "2011-02-13", "2011-03-28"}},
                {"TYPE_OF_CAKE", {"VANILLA"}}});
  CHECK(a.total() == expected);
}

TEST_CASE("rollup aggregates a dimension away") {
  Cube cube = bakery::cube();

  SUBCASE("rolling up marital status gives the cake-by-date table") {
    CrossTab ct = cube.rollup("MARITAL_STATUS").crosstab("TYPE_OF_CAKE", "DATE");
    CHECK(ct.counts == std::vector<std::vector<std::uint64_t>>{
                           {0, 0, 2, 1}, {2, 1, 0, 0}, {0, 1, 0, 0}});
    CHECK(ct.row_totals == std::vector<std::uint64_t>{3, 3, 1});
    CHECK(ct.col_totals == std::vector<std::uint64_t>{2, 2, 2, 1});
    CHECK(ct.grand_total == 7);
  }
  SUBCASE("successive rollups leave per-cake totals") {
    Cube cakes = cube.rollup("DATE").rollup("MARITAL_STATUS");
    REQUIRE(cakes.dims().size() == 1);
    CHECK(cakes.cell({"WEDDING"}) == 3);
    CHECK(cakes.cell({"VANILLA"}) == 3);
    CHECK(cakes.cell({"MILKY"}) == 1);
  }
  SUBCASE("rollup over a single-member dimension keeps counts") {
    Cube one = build_cube(bakery::clean_table(), {"DATE", "TYPE_OF_CAKE"});
    Cube diced = one.dice({{"TYPE_OF_CAKE", {"MILKY"}}});
    Cube rolled = diced.rollup("TYPE_OF_CAKE");
    CHECK(rolled.total() == diced.total());
  }
  SUBCASE("grand total is preserved") {
    CHECK(cube.rollup("DATE").total() == 7);
    CHECK(cube.rollup("TYPE_OF_CAKE").total() == 7);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(cube.rollup("FLAVOUR"), CubeError);
    Cube last = cube.rollup("DATE").rollup("MARITAL_STATUS");
    CHECK_THROWS_AS(last.rollup("TYPE_OF_CAKE"), CubeError);
  }
}

TEST_CASE("rollup_date regroups to coarser calendar levels") {
  Cube cube = bakery::cube();

  SUBCASE("monthly totals") {
    Cube monthly = cube.rollup_date(DateLevel::Month);
    CHECK(members_of(monthly, "DATE") == std::vector<std::string>{"2011-02", "2011-03"});
    Cube only_month = monthly.rollup("MARITAL_STATUS").rollup("TYPE_OF_CAKE");
    CHECK(only_month.cell({"2011-02"}) == 4);
    CHECK(only_month.cell({"2011-03"}) == 3);
    CHECK(monthly.total() == 7);
  }
  SUBCASE("yearly total") {
    Cube yearly = cube.rollup_date(DateLevel::Year);
    Cube only_year = yearly.rollup("MARITAL_STATUS").rollup("TYPE_OF_CAKE");
    CHECK(only_year.cell({"2011"}) == 7);
  }
  SUBCASE("rolling up to the current level is the identity") {
    Cube monthly = cube.rollup_date(DateLevel::Month);
    CHECK(monthly.rollup_date(DateLevel::Month) == monthly);
    CHECK(cube.rollup_date(DateLevel::Day) == cube);
  }
  SUBCASE("errors") {
    Cube yearly = cube.rollup_date(DateLevel::Year);
    CHECK_THROWS_AS(yearly.rollup_date(DateLevel::Month), CubeError);
    Cube no_date = build_cube(bakery::clean_table(), {"MARITAL_STATUS", "TYPE_OF_CAKE"});
    CHECK_THROWS_AS(no_date.rollup_date(DateLevel::Month), CubeError);
  }
}

TEST_CASE("drilldown recomputes finer granularity from the base table") {
  Cube cube = bakery::cube();

  SUBCASE("inverse of rollup") {
    Cube restored = cube.rollup("MARITAL_STATUS").drilldown("MARITAL_STATUS");
    CHECK(restored == cube);
  }
  SUBCASE("month back down to day") {
    Cube monthly = cube.rollup_date(DateLevel::Month);
    Cube daily = monthly.drilldown_date(DateLevel::Day);
    CHECK(daily == cube);
    Cube per_day = daily.rollup("MARITAL_STATUS").rollup("TYPE_OF_CAKE");
    CHECK(per_day.cell({"2011-02-12"}) == 2);
    CHECK(per_day.cell({"2011-02-13"}) == 2);
    CHECK(per_day.cell({"2011-03-28"}) == 2);
    CHECK(per_day.cell({"2011-03-29"}) == 1);
  }
  SUBCASE("restrictions recorded by slice and dice survive the rebuild") {
    Cube narrowed = cube.slice("TYPE_OF_CAKE", "WEDDING").rollup("MARITAL_STATUS");
    Cube restored = narrowed.drilldown("MARITAL_STATUS");
    CHECK(restored.total() == 3);
    CHECK(restored.cell({"2011-03-28", "SINGLE"}) == 2);

    Cube rediced = cube.dice({{"DATE", {"2011-02-12", "2011-02-13"}}})
                       .rollup("MARITAL_STATUS")
                       .drilldown("MARITAL_STATUS");
    CHECK(rediced.total() == 4);
    CHECK(members_of(rediced, "DATE") ==
          std::vector<std::string>{"2011-02-12", "2011-02-13"});
  }
  SUBCASE("restoring a sliced dimension keeps its restriction") {
    Cube restored = cube.slice("TYPE_OF_CAKE", "MILKY").drilldown("TYPE_OF_CAKE");
    CHECK(members_of(restored, "TYPE_OF_CAKE") == std::vector<std::string>{"MILKY"});
    CHECK(members_of(restored, "DATE").size() == 4);
    CHECK(restored.total() == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(cube.drilldown("MARITAL_STATUS"), CubeError);  // already present
    CHECK_THROWS_AS(cube.rollup("DATE").drilldown("FLAVOUR"), CubeError);
    CHECK_THROWS_AS(cube.drilldown_date(DateLevel::Day), CubeError);  // not finer
    Cube imported = Cube::from_json_text(cube.to_json_text());
    Cube rolled_import = imported.rollup("MARITAL_STATUS");
    CHECK_THROWS_AS(rolled_import.drilldown("MARITAL_STATUS"), CubeError);  // no base
  }
}

TEST_CASE("crosstab produces dense grids with marginals") {
  Cube cube = bakery::cube();

  SUBCASE("cake by marital status, date rolled up implicitly") {
    CrossTab ct = cube.crosstab("TYPE_OF_CAKE", "MARITAL_STATUS");
    CHECK(ct.counts ==
          std::vector<std::vector<std::uint64_t>>{{3, 0, 0}, {3, 0, 0}, {0, 1, 0}});
    CHECK(ct.row_totals == std::vector<std::uint64_t>{3, 3, 1});
    CHECK(ct.col_totals == std::vector<std::uint64_t>{6, 1, 0});
    CHECK(ct.grand_total == 7);
  }
  SUBCASE("marginal consistency") {
    CrossTab ct = cube.crosstab("DATE", "TYPE_OF_CAKE");
    std::uint64_t row_sum = 0, col_sum = 0;
    for (auto v : ct.row_totals) row_sum += v;
    for (auto v : ct.col_totals) col_sum += v;
    CHECK(row_sum == ct.grand_total);
    CHECK(col_sum == ct.grand_total);
    CHECK(ct.grand_total == cube.total());
  }
  SUBCASE("empty cube with declared members gives an all-zero grid") {
    Table empty = bakery::clean_table();
    empty.rows.clear();
    Cube cube0 = build_cube(empty, {"MARITAL_STATUS", "TYPE_OF_CAKE"},
                            bakery::declared_members());
    CrossTab ct = cube0.crosstab("TYPE_OF_CAKE", "MARITAL_STATUS");
    CHECK(ct.grand_total == 0);
    CHECK(ct.counts ==
          std::vector<std::vector<std::uint64_t>>{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
    CHECK(ct.row_totals == std::vector<std::uint64_t>{0, 0, 0});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(cube.crosstab("DATE", "DATE"), CubeError);
    CHECK_THROWS_AS(cube.crosstab("DATE", "FLAVOUR"), CubeError);
  }
}

TEST_CASE("argmax picks the largest marginal, first member on ties") {
  Cube cube = bakery::cube();

  SUBCASE("single customers dominate") {
    CrossTab ct = cube.crosstab("TYPE_OF_CAKE", "MARITAL_STATUS");
    CHECK(ct.argmax(CrossTab::Axis::Col) == CrossTab::Margin{"SINGLE", 6, false});
  }
  SUBCASE("february is the top month") {
    CrossTab ct = cube.rollup_date(DateLevel::Month)
                      .rollup("MARITAL_STATUS")
                      .crosstab("TYPE_OF_CAKE", "DATE");
    CHECK(ct.argmax(CrossTab::Axis::Col) == CrossTab::Margin{"2011-02", 4, false});
  }
  SUBCASE("cake rows tie at 3") {
    CrossTab ct = cube.crosstab("TYPE_OF_CAKE", "DATE");
    CrossTab::Margin top = ct.argmax(CrossTab::Axis::Row);
    CHECK(top.member == "WEDDING");  // first in dimension order
    CHECK(top.count == 3);
    CHECK(top.tied);
  }
  SUBCASE("all-zero grid reports a tie on the first member") {
    Table empty = bakery::clean_table();
    empty.rows.clear();
    Cube cube0 = build_cube(empty, {"MARITAL_STATUS", "TYPE_OF_CAKE"},
                            bakery::declared_members());
    CrossTab::Margin top = cube0.crosstab("TYPE_OF_CAKE", "MARITAL_STATUS")
                               .argmax(CrossTab::Axis::Row);
    CHECK(top == CrossTab::Margin{"WEDDING", 0, true});
  }
  SUBCASE("scaling every count leaves the winner unchanged") {
    Table tripled = bakery::clean_table();
    std::vector<Record> rows = tripled.rows;
    for (int k = 0; k < 2; ++k) {
      tripled.rows.insert(tripled.rows.end(), rows.begin(), rows.end());
    }
    Cube big = build_cube(tripled, bakery::dimensions(), bakery::declared_members());
    CHECK(big.crosstab("TYPE_OF_CAKE", "MARITAL_STATUS").argmax(CrossTab::Axis::Col).member ==
          "SINGLE");
    CHECK(big.total() == 21);
  }
}

TEST_CASE("cube JSON export and import round-trip") {
  Cube cube = bakery::cube();
  Cube imported = Cube::from_json_text(cube.to_json_text());
  CHECK(imported == cube);
  CHECK(imported.total() == 7);
  CHECK(imported.cell({"2011-03-28", "SINGLE", "WEDDING"}) == 2);

  CHECK_THROWS_AS(Cube::from_json_text("nope"), ConfigError);
  CHECK_THROWS_AS(Cube::from_json_text(R"({"dimensions": [], "cells": [[[0], 1]]})"),
                  ConfigError);
  CHECK_THROWS_AS(
      Cube::from_json_text(
          R"({"dimensions": [{"name": "A", "type": "categorical", "members": ["X"]}],
              "cells": [[[0], 0]]})"),
      ConfigError);
  CHECK_THROWS_AS(
      Cube::from_json_text(
          R"({"dimensions": [{"name": "A", "type": "categorical", "members": ["X"]}],
              "cells": [[[4], 1]]})"),
      ConfigError);
}

TEST_CASE("random cubes agree with the brute-force oracle") {
  std::mt19937 rng(424242);
  for (int round = 0; round < 40; ++round) {
    Table table = oracle::random_table(rng, 4, 6, 200);
    std::vector<std::string> columns;
    for (const Column& c : table.schema.columns) columns.push_back(c.name);
    Cube cube = build_cube(table, columns);
    CHECK(cube.total() == table.num_rows());

    auto expected = oracle::group_count(table, columns);
    // dense enumeration
    std::vector<std::string> coordinate(columns.size());
    std::function<void(std::size_t)> walk = [&](std::size_t d) {
      if (d == columns.size()) {
        auto it = expected.find(coordinate);
        std::uint64_t want = it == expected.end() ? 0 : it->second;
        CHECK(cube.cell(coordinate) == want);
        return;
      }
      for (const std::string& m : cube.dims()[d].members()) {
        coordinate[d] = m;
        walk(d + 1);
      }
    };
    if (table.num_rows() > 0) walk(0);

    // literal per-row filter spot checks
    std::uniform_int_distribution<std::size_t> pick_row(0, table.num_rows() ? table.num_rows() - 1 : 0);
    for (int probe = 0; probe < 5 && table.num_rows() > 0; ++probe) {
      const Record& row = table.rows[pick_row(rng)];
      std::vector<std::string> coord;
      for (const Value& v : row) coord.push_back(std::get<std::string>(v));
      CHECK(cube.cell(coord) == oracle::coordinate_count(table, columns, coord));
    }

    // rollup commutativity on the first two dimensions
    if (columns.size() >= 2) {
      Cube ab = cube.rollup(columns[0]).rollup(columns[1]);
      Cube ba = cube.rollup(columns[1]).rollup(columns[0]);
      CHECK(ab == ba);
    }

    // slice/dice consistency on a random member
    if (table.num_rows() > 0) {
      const Dimension& d0 = cube.dims()[0];
      std::uniform_int_distribution<std::size_t> pick_member(0, d0.members().size() - 1);
      const std::string member = d0.members()[pick_member(rng)];
      Cube sliced = cube.slice(d0.name(), member);
      Cube diced = cube.dice({{d0.name(), {member}}});
      CHECK(sliced.total() == diced.total());
      for (const auto& [values, count] : listed_cells(sliced)) {
        std::vector<std::string> full{member};
        full.insert(full.end(), values.begin(), values.end());
        CHECK(diced.cell(full) == count);
      }
    }
  }
}
