// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "slicebench/harness/experiment.hpp"
#include "slicebench/harness/report.hpp"
#include "slicebench/improve/improve.hpp"
#include "slicebench/slicing/dynamic_slicer.hpp"
#include "slicebench/slicing/static_slicer.hpp"
#include "slicebench/taxonomy/taxonomy.hpp"
#include "support.hpp"

using namespace slicebench;
using nlohmann::json;

namespace {

// Tolerances.
constexpr double kStaticBudgetSeconds = 5.0;
constexpr int kMaxCfgNodesForPaths = 12;
constexpr int kMinStrictContainments = 3;
constexpr double kExpectedU = 63.0;
constexpr double kExpectedP = 0.62;
constexpr double kPTolerance = 0.02;
constexpr int kFuzzCases = 1000;
constexpr double kScoreTolerance = 1e-9;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& measured) {
  std::printf("%s [%d] %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), measured.c_str());
  if (!pass) ++failures;
}

void check(int id, const std::string& what, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, measured] = body();
    report(id, pass, what, measured);
  } catch (const std::exception& e) {
    report(id, false, what, std::string("threw: ") + e.what());
  }
}

json expected_json(const std::string& id) {
  return json::parse(testing::read_file(testing::corpus_dir() / "expected" / (id + ".json")));
}

const harness::Dataset& corpus() {
  static const harness::Dataset ds = harness::ingest_dataset(testing::corpus_dir());
  return ds;
}

std::vector<int> return_static(const harness::ProgramEntry& p) {
  const int line = *harness::main_return_line(*p.ast);
  const auto& ret = p.ast->stmt(frontend::statement_at(*p.ast, line));
  return slicing::static_backward_slice(*p.ast, *p.pdg,
                                        {slicing::Mode::Static, p.ast->symbol(ret.method, ret.uses.front()).name, line})
      .lines;
}

class TruthProvider : public llm::Provider {
 public:
  TruthProvider(const std::map<std::string, harness::GroundTruth>& truth, bool drop) : truth_(truth), drop_(drop) {}
  llm::Completion complete(const std::string&, const llm::ModelConfig&, const llm::CallContext& ctx) override {
    auto lines = truth_.at(ctx.task_id).lines;
    if (drop_) lines.erase(lines.begin());
    return {llm::render_output(lines), {}};
  }

 private:
  const std::map<std::string, harness::GroundTruth>& truth_;
  bool drop_;
};

std::vector<harness::ExperimentRecord> mock_run(const std::map<std::string, harness::GroundTruth>& truth, bool drop,
                                                const std::string& tag) {
  testing::TempDir dir("acceptance-" + tag);
  harness::ExperimentConfig config;
  llm::ModelConfig m;
  m.name = "mock";
  m.provider = "mock";
  config.models = {m};
  config.runs = 1;
  config.output = dir.path() / "results.jsonl";
  harness::RunOptions options;
  options.provider_factory = [&](const llm::ModelConfig&) { return std::make_unique<TruthProvider>(truth, drop); };
  harness::run_experiment(config, corpus(), truth, options);
  return harness::load_records(config.output);
}

}  // namespace

int main() {
  check(1, "static slicer reproduces the hand-verified corpus slices within the time budget", [] {
    const auto start = std::chrono::steady_clock::now();
    int match = 0, total = 0;
    for (const auto& task : corpus().tasks) {
      if (task.criterion.mode != slicing::Mode::Static) continue;
      const auto& p = corpus().program(task.program_id);
      ++total;
      match += slicing::static_backward_slice(*p.ast, *p.pdg, task.criterion).lines ==
               expected_json(task.program_id).at("static").get<std::vector<int>>();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream m;
    m << match << "/" << total << " match, " << secs << " s";
    return std::pair{match == 20 && total == 20 && secs < kStaticBudgetSeconds, m.str()};
  });

  check(2, "PDG edges equal the def-clear and path-enumeration oracles", [] {
    int bad = 0, small = 0, methods = 0;
    for (const auto& [id, p] : corpus().programs) {
      bad += testing::oracles::flow_mismatches(*p.ast, *p.pdg, kMaxCfgNodesForPaths, small);
      methods += static_cast<int>(p.ast->methods.size());
    }
    std::ostringstream m;
    m << bad << " mismatching of " << methods << " methods, " << small << " small CFGs path-checked";
    return std::pair{bad == 0 && small > 0, m.str()};
  });

  check(3, "dynamic slices are contained in the static slice of the returned variable", [] {
    int contained = 0, strict = 0, total = 0;
    for (const auto& [id, p] : corpus().programs) {
      const auto trace = slicing::execute(*p.ast, *p.pdg);
      const auto dyn = slicing::dynamic_backward_slice(*p.ast, trace, *harness::main_return_line(*p.ast)).lines;
      const auto ref = return_static(p);
      ++total;
      if (std::includes(ref.begin(), ref.end(), dyn.begin(), dyn.end())) {
        ++contained;
        strict += dyn.size() < ref.size();
      }
    }
    std::ostringstream m;
    m << contained << "/" << total << " contained, " << strict << " strict";
    return std::pair{contained == total && strict >= kMinStrictContainments, m.str()};
  });

  check(4, "every oracle slice contains its criterion line", [] {
    const auto truth = harness::gen_ground_truth(corpus(), {});
    int with = 0, total = 0;
    for (const auto& task : corpus().tasks) {
      const auto& lines = truth.at(task.task_id).lines;
      ++total;
      with += std::binary_search(lines.begin(), lines.end(), task.criterion.line);
    }
    std::ostringstream m;
    m << with << "/" << total;
    return std::pair{with == total && total == 40, m.str()};
  });

  check(5, "Mann-Whitney U on static vs dynamic Acc-D", [] {
    const auto tables =
        json::parse(testing::read_file(testing::source_dir() / "data" / "reference" / "accuracy_tables.json"));
    std::vector<double> a, b;
    for (const auto& c : tables.at("static")) a.push_back(c.at("acc_d").get<double>());
    for (const auto& c : tables.at("dynamic")) b.push_back(c.at("acc_d").get<double>());
    const auto r = metrics::mann_whitney_u(a, b);
    std::ostringstream m;
    m << "U=" << r.u_statistic << " p=" << r.p_value;
    return std::pair{a.size() == 12 && b.size() == 12 && r.u_statistic == kExpectedU &&
                         std::abs(r.p_value - kExpectedP) <= kPTolerance,
                     m.str()};
  });

  check(6, "prompts match the six goldens byte for byte", [] {
    const auto dir = testing::source_dir() / "tests" / "golden";
    const frontend::SourceProgram program("target", testing::read_file(dir / "target.java"));
    int same = 0;
    for (auto mode : {slicing::Mode::Static, slicing::Mode::Dynamic}) {
      for (auto s : {llm::Strategy::ZeroShot, llm::Strategy::OneShot, llm::Strategy::OneShotCot}) {
        llm::PromptSpec spec;
        spec.mode = mode;
        spec.strategy = s;
        spec.program = &program;
        spec.criterion = mode == slicing::Mode::Static ? slicing::SlicingCriterion{mode, "b", 5}
                                                       : slicing::SlicingCriterion{mode, "", 5};
        const auto name = std::string(slicing::to_string(mode)) + "_" + llm::to_string(s) + ".txt";
        same += llm::build_prompt(spec) == testing::read_file(dir / name);
      }
    }
    return std::pair{same == 6, std::to_string(same) + "/6 identical"};
  });

  check(7, "response parser fixtures and fuzz", [] {
    using K = llm::ParseFailureKind;
    struct Fixture {
      std::string raw;
      std::optional<std::vector<int>> lines;
      K kind = K::MalformedJson;
    };
    const std::vector<Fixture> fixtures = {
        {R"({"output": ["2", "1"]})", std::vector<int>{1, 2}},
        {"```json\n{\"output\": [3]}\n```", std::vector<int>{3}},
        {R"({"result": [1]})", std::nullopt, K::MissingOutputField},
        {R"({"output": ["x"]})", std::nullopt, K::NonNumericLine},
        {R"({"output": []})", std::nullopt, K::EmptyOutput},
        {"", std::nullopt, K::EmptyOutput},
        {R"({"output": ["1", )", std::nullopt, K::MalformedJson},
    };
    int ok = 0;
    for (const auto& f : fixtures) {
      const auto r = llm::parse_slice_response(f.raw, 20);
      if (f.lines) ok += std::holds_alternative<llm::ParsedSlice>(r) && std::get<llm::ParsedSlice>(r).lines == *f.lines;
      else ok += std::holds_alternative<llm::ParseFailure>(r) && std::get<llm::ParseFailure>(r).kind == f.kind;
    }
    std::mt19937_64 rng(99);
    const std::string alphabet = "{}[]\",:0123456789-.eoutp` \n\\ax";
    int survived = 0;
    for (int i = 0; i < kFuzzCases; ++i) {
      std::string raw = i % 3 == 0 ? "{\"output\": [" : "";
      const int n = static_cast<int>(rng() % 40);
      for (int k = 0; k < n; ++k) raw += alphabet[rng() % alphabet.size()];
      try {
        const auto r = llm::parse_slice_response(raw, 20);
        bool sane = true;
        if (const auto* s = std::get_if<llm::ParsedSlice>(&r)) {
          sane = std::is_sorted(s->lines.begin(), s->lines.end()) && !s->lines.empty() && s->lines.front() >= 1 &&
                 s->lines.back() <= 20;
        }
        survived += sane;
      } catch (...) {
      }
    }
    std::ostringstream m;
    m << ok << "/" << fixtures.size() << " fixtures, " << survived << "/" << kFuzzCases << " fuzz cases";
    return std::pair{ok == static_cast<int>(fixtures.size()) && survived == kFuzzCases, m.str()};
  });

  check(8, "echo mock scores 100/100 and a one-line-drop mock scores (n-1)/n", [] {
    const auto truth = harness::gen_ground_truth(corpus(), {});
    const auto echo = harness::aggregate_records(mock_run(truth, false, "echo"));
    bool echo_ok = !echo.empty();
    for (const auto& row : echo) {
      echo_ok = echo_ok && std::abs(row.aggregate.acc_d - 100.0) < kScoreTolerance &&
                std::abs(row.aggregate.acc_em - 100.0) < kScoreTolerance;
    }
    int drop_ok = 0, drop_total = 0;
    for (const auto& r : mock_run(truth, true, "drop")) {
      const double n = static_cast<double>(truth.at(r.task_id).lines.size());
      ++drop_total;
      drop_ok += std::abs(r.score.acc_d - (n - 1) / n) < kScoreTolerance && !r.score.exact_match;
    }
    std::ostringstream m;
    m << "echo " << (echo_ok ? "100/100" : "off") << " over " << echo.size() << " cells, drop " << drop_ok << "/"
      << drop_total << " tasks at (n-1)/n";
    return std::pair{echo_ok && drop_ok == drop_total && drop_total == 120, m.str()};
  });

  check(9, "fixing 4/100 tasks gives +4.00; GPT-4o bars 60.84 / 64.19 / 64.28", [] {
    std::vector<std::vector<metrics::TaskScore>> base(1), rerun(1);
    for (int t = 0; t < 100; ++t) {
      const std::string id = "t" + std::to_string(t);
      base[0].push_back({id, false, t < 4 ? 0.0 : 0.5, false});
      if (t < 4) rerun[0].push_back({id, true, 1.0, false});
    }
    const auto row = improve::improvement_delta("m", "crafted", base, improve::merge_scores(base, rerun));
    const auto bars =
        improve::load_improvement_bars(testing::source_dir() / "data" / "reference" / "improvement_bars.json");
    std::string gpt4o;
    for (const auto& b : bars) {
      if (b.model == "gpt-4o") {
        gpt4o = metrics::format_percent(b.vanilla) + " / " + metrics::format_percent(b.crafted) + " / " +
                (b.iterative ? metrics::format_percent(*b.iterative) : "-");
      }
    }
    const std::string delta = "+" + metrics::format_percent(row.delta);
    return std::pair{delta == "+4.00" && gpt4o == "60.84 / 64.19 / 64.28", "delta " + delta + ", bars " + gpt4o};
  });

  check(10, "reference labels give C2 = 39 and A4 = 78; flow map conserves counts", [] {
    const taxonomy::LabelStore store(testing::source_dir() / "data" / "reference" / "labels.jsonl");
    const auto labels = store.resolved_labels();
    const auto d = taxonomy::distribution(labels);
    std::map<std::string, std::size_t> into;
    std::size_t flowed = 0;
    for (const auto& f : taxonomy::flow_map(labels)) {
      into[f.location] += f.count;
      flowed += f.count;
    }
    bool conserved = flowed == d.location_memberships;
    for (const auto& [loc, n] : d.locations) conserved = conserved && into[loc] == n;
    std::ostringstream m;
    m << d.total << " labels, C2=" << d.root_causes.at("C2") << " A4=" << d.locations.at("A4")
      << (conserved ? ", conserved" : ", not conserved");
    return std::pair{d.total == 92 && d.root_causes.at("C2") == 39 && d.locations.at("A4") == 78 && conserved, m.str()};
  });

  return failures == 0 ? 0 : 1;
}
