#include "slicebench/improve/improve.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>

namespace slicebench::improve {

using taxonomy::Cause;
using taxonomy::ConstraintKind;
using taxonomy::FaultLocation;
using taxonomy::RootCause;

namespace {

const std::string kCraftedProgram =
    "public class Crafted {\n"
    "    public static int main(String[] args) {\n"
    "        int[] values = {4, 7, 1, 9};\n"
    "        int best = 0;\n"
    "        int count = 0;\n"
    "        for (int i = 0; i < values.length; i++) {\n"
    "            for (int j = i + 1; j < values.length; j++) {\n"
    "                int diff = values[j] - values[i];\n"
    "                if (diff > best) {\n"
    "                    best = diff;\n"
    "                }\n"
    "                count++;\n"
    "            }\n"
    "        }\n"
    "        return best;\n"
    "    }\n"
    "}\n";

const char* kOrdinals[] = {"first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth"};

std::string ordinal(int n) { return n >= 1 && n <= 10 ? kOrdinals[n - 1] : "latest"; }

std::string join_locations(const std::vector<FaultLocation>& locations) {
  std::string out;
  for (std::size_t i = 0; i < locations.size(); ++i) {
    if (i) out += i + 1 == locations.size() ? " and " : ", ";
    out += taxonomy::display_name(locations[i]);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

}  // namespace

const CraftedExample& default_crafted_example() {
  static const CraftedExample kExample = [] {
    CraftedExample e;
    e.code = llm::number_lines(frontend::SourceProgram("crafted", kCraftedProgram));
    e.criterion = "best@15";
    e.reasoning =
        "1. Line 15 returns best, so line 15 is in the output.\n"
        "2. Variable declarations and assignments: best is declared at line 4 and reassigned at line 10. "
        "Line 10 copies diff, which is declared at line 8 from values (line 3). All of these lines are kept.\n"
        "3. Line 10 runs only when the condition at line 9 holds, so line 9 is kept.\n"
        "4. Complex control flow: line 9 sits inside the inner loop at line 7, which sits inside the outer loop "
        "at line 6. Both loop headers decide how often line 10 can run and which i and j it sees, so lines 6 "
        "and 7 are kept.\n"
        "5. count at lines 5 and 12 never reaches best, so those lines are left out.\n"
        "6. The enclosing class and method declarations at lines 1 and 2 are kept.";
    e.output = {1, 2, 3, 4, 6, 7, 8, 9, 10, 15};
    e.covered_categories = {Cause{RootCause::ComplexControlFlow, {}}, Cause{RootCause::LogicConditional, {}},
                            Cause{RootCause::LogicLoop, {}}};
    e.location_notes = {FaultLocation::VariableDeclarationsAndAssignments, FaultLocation::LoopConstructs,
                        FaultLocation::ConditionalStatements};
    return e;
  }();
  return kExample;
}

std::string craft_enhanced_prompt(const llm::PromptSpec& spec, const CraftedExample& example) {
  if (spec.strategy != llm::Strategy::OneShotCot) {
    throw Error("StrategyMismatch", "crafted prompts build on the one-shot CoT prompt");
  }
  const auto& cats = example.covered_categories;
  if (std::find(cats.begin(), cats.end(), Cause{RootCause::ComplexControlFlow, {}}) == cats.end()) {
    throw CategoryGap("crafted example does not cover Complex Control Flow");
  }
  const auto& locs = example.location_notes;
  if (std::find(locs.begin(), locs.end(), FaultLocation::VariableDeclarationsAndAssignments) == locs.end()) {
    throw CategoryGap("crafted example has no note on Variable Declarations and Assignments");
  }
  llm::PromptSpec crafted = spec;
  crafted.example = llm::ShotExample{example.code, example.criterion, example.reasoning, example.output};
  return llm::build_prompt(crafted);
}

std::string feedback_stanza(const std::string& prior_response, const taxonomy::TaskLabel& feedback, int iteration) {
  const std::string where = join_locations(feedback.locations);
  std::string out = "Feedback on your " + ordinal(iteration) + " answer:\n\n";
  out += "Your previous answer was:\n" + trim(prior_response) + "\n\n";
  out += "That answer is not correct. A reviewer identified the root cause: failure to capture " +
         taxonomy::display_name(feedback.root_cause) + " (" + taxonomy::category_name(feedback.root_cause) +
         "). The mistake is located in " + where + ".\n";
  out += "Regenerate the slice for the same Slicing Criterion and make sure that " + where +
         " are analyzed carefully so that this mistake does not happen again.\n";
  if (feedback.root_cause == Cause{RootCause::ModelConstraint, ConstraintKind::JsonParsing}) {
    out +=
        "\nOutput Format:\n"
        "\n"
        "- An array of line numbers in plain JSON without any markdown in the following format:\n"
        "{\"output\": [\"line_number1\", \"line_number2\"]}\n";
  }
  return out + "\n";
}

std::string iterative_reprompt(const std::string& task_id, const std::string& original_prompt,
                               const std::string& prior_response, const taxonomy::TaskLabel* feedback, int iteration) {
  if (!feedback) throw MissingLabel(task_id);
  static const std::string kTail = "Output:\n";
  std::string head = original_prompt;
  if (head.size() >= kTail.size() && head.compare(head.size() - kTail.size(), kTail.size(), kTail) == 0) {
    head.resize(head.size() - kTail.size());
  } else if (!head.empty() && head.back() != '\n') {
    head += "\n\n";
  }
  return head + feedback_stanza(prior_response, *feedback, iteration) + kTail;
}

std::vector<std::vector<metrics::TaskScore>> merge_scores(const std::vector<std::vector<metrics::TaskScore>>& baseline,
                                                          const std::vector<std::vector<metrics::TaskScore>>& rerun) {
  auto merged = baseline;
  for (std::size_t r = 0; r < merged.size() && r < rerun.size(); ++r) {
    std::map<std::string, const metrics::TaskScore*> by_id;
    for (const auto& s : rerun[r]) by_id[s.task_id] = &s;
    for (auto& s : merged[r]) {
      if (auto it = by_id.find(s.task_id); it != by_id.end()) s = *it->second;
    }
  }
  return merged;
}

ImprovementRow improvement_delta(const std::string& model, const std::string& strategy,
                                 const std::vector<std::vector<metrics::TaskScore>>& baseline,
                                 const std::vector<std::vector<metrics::TaskScore>>& improved) {
  if (baseline.empty() || baseline.front().empty()) throw BaselineMissing("no vanilla results for " + model);
  ImprovementRow row;
  row.model = model;
  row.strategy = strategy;
  row.vanilla = metrics::aggregate(baseline).acc_d;
  row.improved = improved.empty() ? row.vanilla : metrics::aggregate(improved).acc_d;
  row.delta = row.improved - row.vanilla;
  return row;
}

std::vector<ImprovementBars> load_improvement_bars(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot read " + path.string());
  const auto j = nlohmann::json::parse(in);
  std::vector<ImprovementBars> out;
  for (const auto& m : j.at("models")) {
    ImprovementBars b;
    b.model = m.at("model").get<std::string>();
    b.vanilla = m.at("vanilla").get<double>();
    b.crafted = m.at("crafted").get<double>();
    if (m.contains("iterative") && !m["iterative"].is_null()) b.iterative = m["iterative"].get<double>();
    out.push_back(std::move(b));
  }
  return out;
}

std::string render_improvement_bars(const std::vector<ImprovementBars>& bars) {
  auto fmt = [](double v) { return metrics::format_percent(v); };
  auto signed_fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.2f", v);
    return std::string(buf);
  };
  std::string out = "model | vanilla | crafted | iterative\n";
  for (const auto& b : bars) {
    out += b.model + " | " + fmt(b.vanilla) + " | " + fmt(b.crafted) + " (" + signed_fmt(b.crafted - b.vanilla) + ") | ";
    out += b.iterative ? fmt(*b.iterative) + " (" + signed_fmt(*b.iterative - b.vanilla) + ")" : std::string("-");
    out += "\n";
  }
  return out;
}

}  // namespace slicebench::improve
