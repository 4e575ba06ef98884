#include <doctest.h>

#include <json.hpp>
#include <set>
#include <sstream>

#include "slicebench/taxonomy/taxonomy.hpp"
#include "support.hpp"

using namespace slicebench;
using namespace slicebench::taxonomy;

namespace {

std::filesystem::path reference_labels() { return testing::source_dir() / "data" / "reference" / "labels.jsonl"; }

FailureLabel label(const std::string& task, const std::string& cause, std::vector<FaultLocation> locs,
                   const std::string& reviewer) {
  FailureLabel l;
  l.task_id = task;
  l.root_cause = cause_from_code(cause);
  l.locations = std::move(locs);
  l.reviewer = reviewer;
  return l;
}

std::string error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return "";
}

}  // namespace

TEST_CASE("reference labels reproduce the published counts") {
  const LabelStore store(reference_labels());
  const auto labels = store.resolved_labels();
  const auto d = distribution(labels);
  CHECK(d.total == 92);
  CHECK(d.root_causes.at("C2") == 39);
  CHECK(d.locations.at("A4") == 78);
  CHECK(std::max_element(d.root_causes.begin(), d.root_causes.end(), [](auto& a, auto& b) {
          return a.second < b.second;
        })->first == "C2");
  CHECK(std::max_element(d.locations.begin(), d.locations.end(), [](auto& a, auto& b) {
          return a.second < b.second;
        })->first == "A4");

  // Independent count straight from the file.
  std::istringstream in(testing::read_file(reference_labels()));
  std::string line;
  std::map<std::string, int> causes, locations;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    ++causes[j.at("root_cause").get<std::string>()];
    for (const auto& l : j.at("locations")) ++locations[l.get<std::string>()];
  }
  for (const auto& [c, n] : causes) CHECK(d.root_causes.at(c) == static_cast<std::size_t>(n));
  for (const auto& [l, n] : locations) CHECK(d.locations.at(l) == static_cast<std::size_t>(n));
}

TEST_CASE("flow map conserves counts") {
  const LabelStore store(reference_labels());
  const auto labels = store.resolved_labels();
  const auto d = distribution(labels);
  const auto flows = flow_map(labels);
  std::map<std::string, std::size_t> out_of_cause, into_location;
  std::size_t total = 0;
  for (const auto& f : flows) {
    CHECK(f.count > 0);
    out_of_cause[f.root_cause] += f.count;
    into_location[f.location] += f.count;
    total += f.count;
  }
  CHECK(total == d.location_memberships);
  for (const auto& [loc, n] : d.locations) CHECK(into_location[loc] == n);
  std::map<std::string, std::size_t> expected_out;
  for (const auto& l : labels) expected_out[code(l.root_cause)] += l.locations.size();
  CHECK(out_of_cause == expected_out);

  auto ranked = flows;
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
  REQUIRE(ranked.size() >= 3);
  CHECK(ranked[0].root_cause == "C2");
  CHECK(ranked[1].root_cause == "C2");
  CHECK(std::set<std::string>{ranked[0].location, ranked[1].location} == std::set<std::string>{"A2", "A4"});
  CHECK(ranked[2].count < ranked[1].count);
  const auto csv = flow_map_csv(flows);
  CHECK(csv.rfind("root_cause,location,count\n", 0) == 0);
}

TEST_CASE("codes and names") {
  for (const auto& c : all_causes()) CHECK(cause_from_code(code(c)) == c);
  for (auto l : all_locations()) CHECK(location_from_code(code(l)) == l);
  CHECK(all_causes().size() == 8);
  CHECK(all_locations().size() == 6);
  CHECK(code(FaultLocation::VariableDeclarationsAndAssignments) == "A4");
  CHECK(category_name(cause_from_code("B2")) == "Lack of Logic Understanding");
  CHECK(category_name(cause_from_code("C2")) == "Code Complexity");
  CHECK(category_name(cause_from_code("MC-JsonParsing")) == "Model-specific Constraints");
  CHECK(error_kind([] { cause_from_code("Z9"); }) == "InvalidLabel");
  CHECK(error_kind([] { location_from_code("A7"); }) == "InvalidLabel");
}

TEST_CASE("label validation") {
  LabelStore store;
  CHECK(error_kind([&] { store.record_label(label("t", "C2", {}, "r")); }) == "InvalidLabel");
  CHECK(error_kind([&] { store.record_label(label("", "C2", {FaultLocation::Imports}, "r")); }) == "InvalidLabel");
  const auto lookup = [](const std::string& id) -> std::optional<bool> {
    if (id == "failed") return true;
    if (id == "passed") return false;
    return std::nullopt;
  };
  CHECK(error_kind([&] { store.record_label(label("nope", "C2", {FaultLocation::Imports}, "r"), lookup); }) ==
        "UnknownTask");
  CHECK(error_kind([&] { store.record_label(label("passed", "C2", {FaultLocation::Imports}, "r"), lookup); }) ==
        "NotAFailure");
  const auto out = store.record_label(
      label("failed", "B1", {FaultLocation::LoopConstructs, FaultLocation::ConditionalStatements, FaultLocation::LoopConstructs}, "r"),
      lookup);
  CHECK(out.label.locations ==
        std::vector<FaultLocation>{FaultLocation::ConditionalStatements, FaultLocation::LoopConstructs});
  CHECK(out.label.version == 1);
  CHECK_FALSE(out.label.timestamp.empty());
  CHECK_FALSE(out.disagreement);
}

TEST_CASE("disagreement and resolution") {
  testing::TempDir dir("labels");
  const auto path = dir.path() / "labels.jsonl";
  {
    LabelStore store(path);
    CHECK_FALSE(store.record_label(label("t1", "C2", {FaultLocation::LoopConstructs}, "alice")).disagreement);
    CHECK_FALSE(store.record_label(label("t1", "C2", {FaultLocation::LoopConstructs}, "bob")).disagreement);
    CHECK(store.effective("t1").has_value());

    CHECK(store.record_label(label("t2", "B1", {FaultLocation::ConditionalStatements}, "alice")).label.version == 1);
    CHECK(store.record_label(label("t2", "B2", {FaultLocation::LoopConstructs}, "bob")).disagreement);
    CHECK(store.disagreements() == std::vector<std::string>{"t2"});
    CHECK_FALSE(store.effective("t2").has_value());
    CHECK(error_kind([&] { store.resolved_labels(); }) == "UnresolvedDisagreement");

    Resolution r;
    r.task_id = "t2";
    r.root_cause = cause_from_code("B2");
    r.locations = {FaultLocation::LoopConstructs};
    r.resolver = "carol";
    store.resolve(r);
    CHECK(store.disagreements().empty());
    CHECK(store.resolved_labels().size() == 2);

    // A newer conflicting label reopens the task.
    const auto again = store.record_label(label("t2", "C1", {FaultLocation::ConditionalStatements}, "bob"));
    CHECK(again.disagreement);
    CHECK(again.label.version == 2);
  }
  LabelStore reloaded(path);
  CHECK(reloaded.size() == 6);
  CHECK(reloaded.history("t2").size() == 3);
  CHECK(reloaded.resolutions("t2").size() == 1);
  CHECK(reloaded.disagreements() == std::vector<std::string>{"t2"});
  CHECK(reloaded.effective("t1")->root_cause == cause_from_code("C2"));
}

TEST_CASE("model constraint labels need a constraint kind") {
  auto j = nlohmann::json::parse(
      R"({"task_id": "t", "root_cause": "MC-ContextWindow", "locations": ["A5"], "reviewer": "r"})");
  const auto l = j.get<FailureLabel>();
  CHECK(l.root_cause.cause == RootCause::ModelConstraint);
  CHECK(l.root_cause.constraint == ConstraintKind::ContextWindow);
  CHECK(percent_of(39, 92) == doctest::Approx(42.391304).epsilon(1e-6));
}
