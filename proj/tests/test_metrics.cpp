#include <doctest.h>

#include <json.hpp>

#include "slicebench/metrics/metrics.hpp"
#include "support.hpp"

using namespace slicebench;
using namespace slicebench::metrics;

namespace {

// U of `a` by direct pair counting.
double pair_count_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return u;
}

std::vector<double> column(const nlohmann::json& cells) {
  std::vector<double> out;
  for (const auto& c : cells) out.push_back(c.at("acc_d").get<double>());
  return out;
}

TaskScore score(const std::string& id, double d, bool em = false) { return {id, em, d, false}; }

}  // namespace

TEST_CASE("Mann-Whitney on the reported static and dynamic Acc-D values") {
  const auto tables =
      nlohmann::json::parse(testing::read_file(testing::source_dir() / "data" / "reference" / "accuracy_tables.json"));
  const auto a = column(tables.at("static"));
  const auto b = column(tables.at("dynamic"));
  REQUIRE(a.size() == 12);
  REQUIRE(b.size() == 12);
  const auto r = mann_whitney_u(a, b);
  CHECK(r.u_statistic == pair_count_u(a, b));
  CHECK(r.u_statistic == doctest::Approx(63.0));
  CHECK(r.u_statistic + r.u_other == doctest::Approx(144.0));
  // scipy.stats.mannwhitneyu(a, b, method="asymptotic") gives 0.623604884395689.
  CHECK(r.p_value == doctest::Approx(0.623604884395689).epsilon(1e-9));
  CHECK(r.p_value == doctest::Approx(0.62).epsilon(0.02 / 0.62));
}

TEST_CASE("Mann-Whitney with ties") {
  // Reference values from scipy.stats.mannwhitneyu(..., method="asymptotic").
  const std::vector<double> a{1, 2, 3, 4, 5}, b{3, 6, 7, 8, 9, 10};
  auto r = mann_whitney_u(a, b);
  CHECK(r.u_statistic == doctest::Approx(2.5));
  CHECK(r.p_value == doctest::Approx(0.02810006355731762).epsilon(1e-9));

  const std::vector<double> c{1, 1, 2, 2, 3}, d{2, 2, 3, 4, 4, 5};
  r = mann_whitney_u(c, d);
  CHECK(r.u_statistic == pair_count_u(c, d));
  CHECK(r.u_statistic == doctest::Approx(4.5));
  CHECK(r.p_value == doctest::Approx(0.05980900023086612).epsilon(1e-9));

  r = mann_whitney_u({2, 2}, {2, 2, 2});
  CHECK(r.degenerate);
  CHECK(r.p_value == 1.0);
  CHECK_THROWS(mann_whitney_u({}, {1.0}));
}

TEST_CASE("line-level scores") {
  CHECK(exact_match({3, 1, 2}, {1, 2, 3}));
  CHECK_FALSE(exact_match({1, 2}, {1, 2, 3}));
  CHECK(dependence_accuracy({1, 2, 9}, {1, 2, 3, 4}) == doctest::Approx(0.5));
  CHECK(dependence_accuracy({}, {1, 2}) == 0.0);
  CHECK_THROWS_AS(score_task("t", {1}, {}), EmptyTruth);

  const auto extra = score_task("t", {1, 2, 3, 7}, {1, 2, 3});
  CHECK(extra.acc_d == 1.0);
  CHECK_FALSE(extra.exact_match);
  CHECK_FALSE(is_failure(extra));
  CHECK(is_failure(score_task("t", {1, 2}, {1, 2, 3})));

  const auto failed = parse_failure_score("t");
  CHECK(failed.parse_failed);
  CHECK(failed.acc_d == 0.0);
}

TEST_CASE("edge-level Acc-D") {
  const std::set<LineEdge> edges{{1, 2}, {2, 3}, {1, 3}, {3, 9}};
  CHECK(dependence_accuracy_edges({1, 2, 3}, {1, 2, 3}, edges) == doctest::Approx(1.0));
  CHECK(dependence_accuracy_edges({1, 2}, {1, 2, 3}, edges) == doctest::Approx(1.0 / 3.0));
  CHECK(dependence_accuracy_edges({5}, {5, 6}, edges) == doctest::Approx(0.5));
  CHECK(score_task("t", {1, 2}, {1, 2, 3}, AccDMode::Edges, &edges).acc_d == doctest::Approx(1.0 / 3.0));
  CHECK(acc_d_mode_from_string(to_string(AccDMode::Edges)) == AccDMode::Edges);
}

TEST_CASE("aggregation averages per-run means") {
  const std::vector<std::vector<TaskScore>> runs = {
      {score("p1:static", 1.0, true), score("p2:static", 0.5), score("p2:dynamic", 0.0)},
      {score("p2:dynamic", 1.0), score("p1:static", 0.5), score("p2:static", 0.0)},
  };
  const auto per_task = aggregate(runs);
  CHECK(per_task.runs == 2);
  CHECK(per_task.per_run_acc_d[0] == doctest::Approx(50.0));
  CHECK(per_task.acc_d == doctest::Approx(50.0));
  CHECK(per_task.acc_em == doctest::Approx(100.0 / 6.0));

  const auto per_program = aggregate(runs, Grouping::PerProgram);
  CHECK(per_program.per_run_acc_d[0] == doctest::Approx((1.0 + 0.25) / 2 * 100));
  CHECK(per_program.per_run_acc_d[1] == doctest::Approx((0.5 + 0.5) / 2 * 100));

  CHECK_THROWS_AS(aggregate({}), RunMismatch);
  CHECK_THROWS_AS(aggregate({{score("a", 1)}, {score("b", 1)}}), RunMismatch);
  CHECK_THROWS_AS(aggregate({{score("a", 1), score("a", 0)}}), RunMismatch);
  CHECK(program_of("p03:static") == "p03");
}

TEST_CASE("percent formatting") {
  CHECK(format_percent(60.84) == "60.84");
  CHECK(format_percent(64.0) == "64.00");
  CHECK(format_percent(4.0) == "4.00");
  CHECK(format_percent(100.0 / 3.0) == "33.33");
}
