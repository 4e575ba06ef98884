#include <doctest.h>

#include <random>
#include <regex>
#include <set>

#include "slicebench/harness/improvement.hpp"
#include "slicebench/slicing/static_slicer.hpp"
#include "support.hpp"

using namespace slicebench;
using namespace slicebench::improve;
using metrics::TaskScore;
using taxonomy::FaultLocation;

namespace {

// Undoes llm::number_lines.
std::string strip_numbers(const std::string& numbered) {
  std::istringstream in(numbered);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(line.find(": ") + 2) + "\n";
  return out;
}

std::set<std::string> numbers_in(const std::string& text) {
  std::set<std::string> out;
  const std::regex digits("[0-9]+");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), digits); it != std::sregex_iterator(); ++it) {
    out.insert(it->str());
  }
  return out;
}

taxonomy::TaskLabel task_label(const std::string& cause, std::vector<FaultLocation> locs) {
  return {"p01:static", taxonomy::cause_from_code(cause), std::move(locs)};
}

}  // namespace

TEST_CASE("the crafted example output is the oracle slice") {
  const auto& ex = default_crafted_example();
  const auto ast = frontend::parse_program(strip_numbers(ex.code), "crafted");
  const auto pdg = flow::build_pdg(ast);
  const auto at = ex.criterion.find('@');
  const slicing::SlicingCriterion c{slicing::Mode::Static, ex.criterion.substr(0, at), std::stoi(ex.criterion.substr(at + 1))};
  CHECK(slicing::static_backward_slice(ast, pdg, c).lines == ex.output);
  CHECK(ex.output == std::vector<int>{1, 2, 3, 4, 6, 7, 8, 9, 10, 15});
}

TEST_CASE("crafted prompts") {
  const frontend::SourceProgram program("p", "public class A {\n    public static int main(String[] args) {\n        int x = 1;\n        return x;\n    }\n}\n");
  llm::PromptSpec spec;
  spec.program = &program;
  spec.strategy = llm::Strategy::OneShotCot;
  spec.criterion = {slicing::Mode::Static, "x", 4};
  const auto& ex = default_crafted_example();
  const auto prompt = craft_enhanced_prompt(spec, ex);
  CHECK(prompt.find(ex.reasoning) != std::string::npos);
  CHECK(prompt.find("Slicing Criterion:\nbest@15") != std::string::npos);
  CHECK(prompt.find("sum@10") == std::string::npos);

  auto gap = ex;
  gap.covered_categories = {taxonomy::cause_from_code("B1")};
  CHECK_THROWS_AS(craft_enhanced_prompt(spec, gap), CategoryGap);
  gap = ex;
  gap.location_notes = {FaultLocation::LoopConstructs};
  CHECK_THROWS_AS(craft_enhanced_prompt(spec, gap), CategoryGap);
  spec.strategy = llm::Strategy::ZeroShot;
  CHECK_THROWS(craft_enhanced_prompt(spec, ex));
}

TEST_CASE("feedback never leaks ground-truth line numbers") {
  const std::string prior = "{\"output\": [\"1\", \"2\", \"7\"]}";
  const auto prior_numbers = numbers_in(prior);
  for (const auto& cause : taxonomy::all_causes()) {
    for (std::size_t mask = 1; mask < 64; ++mask) {
      std::vector<FaultLocation> locs;
      for (std::size_t i = 0; i < 6; ++i) {
        if (mask & (1u << i)) locs.push_back(taxonomy::all_locations()[i]);
      }
      for (int iteration : {1, 2, 5, 12}) {
        const auto stanza = feedback_stanza(prior, {"p01:static", cause, locs}, iteration);
        for (const auto& n : numbers_in(stanza)) {
          INFO(stanza);
          CHECK(prior_numbers.count(n) == 1);
        }
      }
    }
  }
}

TEST_CASE("feedback names the labeled root cause and locations") {
  const auto stanza = feedback_stanza("  {\"output\": [\"3\"]}\n", task_label("C2", {FaultLocation::LoopConstructs,
                                                                                   FaultLocation::VariableDeclarationsAndAssignments}),
                                      1);
  CHECK(stanza.find("Complex Control Flow") != std::string::npos);
  CHECK(stanza.find("Loop Constructs and Variable Declarations and Assignments") != std::string::npos);
  CHECK(stanza.find("first answer") != std::string::npos);
  CHECK(stanza.find("Your previous answer was:\n{\"output\": [\"3\"]}\n") != std::string::npos);
  const auto json = feedback_stanza("x", task_label("MC-JsonParsing", {FaultLocation::Imports}), 2);
  CHECK(json.find("Output Format:") != std::string::npos);
}

TEST_CASE("iterative re-prompt keeps the original prompt and ends with Output") {
  const std::string original = "Task text\n\nProgram:\n1: x\n\nOutput:\n";
  const auto label = task_label("B2", {FaultLocation::LoopConstructs});
  const auto prompt = iterative_reprompt("t", original, "{}", &label, 1);
  CHECK(prompt.rfind("Task text\n\nProgram:\n1: x\n\nFeedback on your first answer:", 0) == 0);
  CHECK(prompt.size() > original.size());
  CHECK(prompt.substr(prompt.size() - 8) == "Output:\n");
  CHECK_THROWS_AS(iterative_reprompt("t", original, "{}", nullptr, 1), MissingLabel);
}

TEST_CASE("fixing 4 of 100 tasks adds 4.00 points") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> acc(0.0, 1.0);
  std::vector<std::vector<TaskScore>> baseline(3), rerun(3);
  for (int r = 0; r < 3; ++r) {
    for (int t = 0; t < 100; ++t) {
      const std::string id = "t" + std::to_string(t);
      const bool fixed = t % 25 == 3;
      baseline[r].push_back({id, false, fixed ? 0.0 : acc(rng), false});
      if (fixed) rerun[r].push_back({id, true, 1.0, false});
    }
  }
  const auto merged = merge_scores(baseline, rerun);
  const auto row = improvement_delta("gpt-4o", "crafted", baseline, merged);
  CHECK(row.delta == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(metrics::format_percent(row.delta) == "4.00");
  CHECK_THROWS_AS(improvement_delta("m", "crafted", {}, merged), BaselineMissing);
}

TEST_CASE("applying iterations replaces every run with the last iteration") {
  const std::vector<std::vector<TaskScore>> baseline = {{{"a", false, 0.5, false}, {"b", false, 0.5, false}},
                                                        {{"a", false, 0.0, false}, {"b", false, 1.0, false}}};
  IterationRecord first, second, other_model;
  first.task_id = second.task_id = other_model.task_id = "a";
  first.model = second.model = "m";
  other_model.model = "n";
  first.iteration = 1;
  second.iteration = 2;
  first.score = {"a", false, 0.75, false};
  second.score = {"a", true, 1.0, false};
  other_model.score = {"a", false, 0.0, false};
  const auto applied = harness::apply_iterations(baseline, {second, first, other_model}, "m");
  CHECK(applied[0][0].acc_d == 1.0);
  CHECK(applied[1][0].acc_d == 1.0);
  CHECK(applied[0][1].acc_d == 0.5);
  CHECK(harness::iterative_experiment(1) == "iterative");
  CHECK(harness::iterative_experiment(3) == "iterative-3");
}

TEST_CASE("improvement bars") {
  const auto bars = load_improvement_bars(testing::source_dir() / "data" / "reference" / "improvement_bars.json");
  REQUIRE(bars.size() == 4);
  CHECK(bars[0].model == "gpt-4o");
  CHECK(metrics::format_percent(bars[0].vanilla) == "60.84");
  CHECK(metrics::format_percent(bars[0].crafted) == "64.19");
  REQUIRE(bars[0].iterative.has_value());
  CHECK(metrics::format_percent(*bars[0].iterative) == "64.28");
  CHECK_FALSE(bars[1].iterative.has_value());
  const auto table = render_improvement_bars(bars);
  CHECK(table.find("gpt-4o | 60.84 | 64.19 (+3.35) | 64.28 (+3.44)") != std::string::npos);
  CHECK(table.find("gpt-3.5-turbo | 46.92 | 54.19 (+7.27) | -") != std::string::npos);
}

TEST_CASE("iteration records round-trip through JSON") {
  IterationRecord r;
  r.task_id = "p01:static";
  r.model = "gpt-4o";
  r.iteration = 2;
  r.prior_response = "{}";
  r.feedback = task_label("MC-ContextWindow", {FaultLocation::ClassDeclarations});
  r.prompt = "p";
  r.response = "{\"output\": [1]}";
  r.score = {"p01:static", false, 0.25, false};
  const nlohmann::json j = r;
  const auto back = j.get<IterationRecord>();
  CHECK(back.task_id == r.task_id);
  CHECK(back.model == r.model);
  CHECK(back.iteration == 2);
  CHECK(back.feedback.root_cause == r.feedback.root_cause);
  CHECK(back.feedback.locations == r.feedback.locations);
  CHECK(back.score == r.score);
}
