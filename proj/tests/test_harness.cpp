#include <doctest.h>

#include <atomic>
#include <mutex>
#include <set>

#include "slicebench/harness/experiment.hpp"
#include "slicebench/harness/improvement.hpp"
#include "slicebench/harness/report.hpp"
#include "support.hpp"

using namespace slicebench;
using namespace slicebench::harness;

namespace {

const Dataset& corpus() {
  static const Dataset ds = ingest_dataset(testing::corpus_dir());
  return ds;
}

const std::map<std::string, GroundTruth>& truth() {
  static const auto t = gen_ground_truth(corpus(), {});
  return t;
}

/// Answers every task with its ground truth, optionally minus the first line.
class TruthProvider : public llm::Provider {
 public:
  explicit TruthProvider(bool drop_first) : drop_first_(drop_first) {}
  llm::Completion complete(const std::string& prompt, const llm::ModelConfig&, const llm::CallContext& ctx) override {
    ++calls;
    CHECK(prompt.find("Output:\n") != std::string::npos);
    auto lines = truth().at(ctx.task_id).lines;
    if (drop_first_) lines.erase(lines.begin());
    return {llm::render_output(lines), {}};
  }
  std::atomic<int> calls{0};

 private:
  bool drop_first_;
};

ExperimentConfig config_in(const testing::TempDir& dir, int runs = 1) {
  ExperimentConfig c;
  llm::ModelConfig m;
  m.name = "gpt-4o";
  m.provider = "mock";
  c.models = {m};
  c.runs = runs;
  c.dataset = testing::corpus_dir();
  c.output = dir.path() / "results.jsonl";
  c.fixtures = dir.path() / "fixtures";
  c.labels = dir.path() / "labels.jsonl";
  c.iterations = dir.path() / "iterations.jsonl";
  return c;
}

RunOptions with(llm::Provider* p) {
  RunOptions o;
  o.provider_factory = [p](const llm::ModelConfig&) {
    struct Borrowed : llm::Provider {
      llm::Provider* inner;
      explicit Borrowed(llm::Provider* i) : inner(i) {}
      llm::Completion complete(const std::string& a, const llm::ModelConfig& b, const llm::CallContext& c) override {
        return inner->complete(a, b, c);
      }
    };
    return std::make_unique<Borrowed>(p);
  };
  return o;
}

}  // namespace

TEST_CASE("an echo of the ground truth scores 100/100") {
  testing::TempDir dir("echo");
  auto config = config_in(dir, 2);
  TruthProvider echo(false);
  const auto summary = run_experiment(config, corpus(), truth(), with(&echo));
  CHECK(summary.total == 40 * 3 * 2);
  CHECK(summary.executed == summary.total);
  CHECK(summary.errors == 0);
  const auto rows = aggregate_records(load_records(config.output));
  CHECK(rows.size() == 6);
  for (const auto& row : rows) {
    CHECK(row.aggregate.runs == 2);
    CHECK(row.aggregate.acc_d == doctest::Approx(100.0));
    CHECK(row.aggregate.acc_em == doctest::Approx(100.0));
  }
  CHECK(select_failures(load_records(config.output), "vanilla", "gpt-4o", "one_shot_cot").empty());
}

TEST_CASE("dropping one line scores (n-1)/n per task") {
  testing::TempDir dir("drop");
  auto config = config_in(dir);
  config.strategies = {llm::Strategy::ZeroShot};
  TruthProvider drop(true);
  run_experiment(config, corpus(), truth(), with(&drop));
  const auto records = load_records(config.output);
  REQUIRE(records.size() == 40);
  std::map<std::string, double> expected_mean;
  std::map<std::string, int> count;
  for (const auto& r : records) {
    const double n = static_cast<double>(truth().at(r.task_id).lines.size());
    CHECK(r.score.acc_d == doctest::Approx((n - 1) / n));
    CHECK_FALSE(r.score.exact_match);
    expected_mean[r.mode] += (n - 1) / n;
    ++count[r.mode];
  }
  for (const auto& row : aggregate_records(records)) {
    CHECK(row.aggregate.acc_d == doctest::Approx(100.0 * expected_mean[row.aggregate.mode] / count[row.aggregate.mode]));
    CHECK(row.aggregate.acc_em == 0.0);
  }
  CHECK(select_failures(records, "vanilla", "gpt-4o", "zero_shot").size() == 40);
}

TEST_CASE("an interrupted run resumes without duplicates") {
  testing::TempDir dir("resume");
  auto config = config_in(dir, 2);
  config.strategies = {llm::Strategy::OneShot};
  config.concurrency = 3;
  TruthProvider echo(false);
  auto options = with(&echo);
  options.stop_after = 17;
  const auto first = run_experiment(config, corpus(), truth(), options);
  CHECK(first.executed >= 17);
  CHECK(first.executed < first.total);

  // Simulate a write cut off mid-record.
  {
    std::ofstream out(config.output, std::ios::app);
    out << "{\"experiment\": \"vanilla\", \"task_id\": \"p0";
  }
  const auto partial = load_records(config.output);
  CHECK(partial.size() == first.executed);

  options.stop_after.reset();
  const auto second = run_experiment(config, corpus(), truth(), options);
  CHECK(second.resumed == first.executed);
  CHECK(second.executed + second.resumed == second.total);

  const auto records = load_records(config.output);
  std::set<std::string> keys;
  for (const auto& r : records) keys.insert(r.key());
  CHECK(records.size() == second.total);
  CHECK(keys.size() == records.size());

  const auto third = run_experiment(config, corpus(), truth(), options);
  CHECK(third.executed == 0);
}

TEST_CASE("a corrupt line in the middle of a results file is an error") {
  testing::TempDir dir("corrupt");
  testing::write_file(dir.path() / "r.jsonl", "not json\n{\"experiment\": \"x\", \"task_id\": \"p01:static\"}\n");
  CHECK_THROWS(load_records(dir.path() / "r.jsonl"));
  CHECK(load_records(dir.path() / "missing.jsonl").empty());
}

TEST_CASE("mock fixtures drive a run, provider errors are recorded") {
  testing::TempDir dir("fixtures");
  auto config = config_in(dir);
  config.strategies = {llm::Strategy::ZeroShot};
  config.modes = {slicing::Mode::Static};
  for (const auto& task : corpus().tasks) {
    if (task.criterion.mode != slicing::Mode::Static || task.program_id == "p20") continue;
    const auto& lines = truth().at(task.task_id).lines;
    testing::write_file(config.fixtures / "vanilla" / llm::fixture_file_name(task.task_id),
                        "```json\n" + llm::render_output(lines) + "\n```\n");
  }
  testing::write_file(config.fixtures / "vanilla" / "p01__static.txt", "I am not sure.");
  const auto summary = run_experiment(config, corpus(), truth());
  CHECK(summary.total == 20);
  CHECK(summary.errors == 1);
  const auto records = load_records(config.output);
  int parse_failures = 0, missing = 0;
  for (const auto& r : records) {
    if (r.task_id == "p01:static") {
      REQUIRE(r.failure.has_value());
      CHECK(r.failure->kind == llm::ParseFailureKind::MalformedJson);
      ++parse_failures;
    } else if (r.task_id == "p20:static") {
      CHECK(r.error_kind == "FixtureMissing");
      CHECK(r.score.acc_d == 0.0);
      ++missing;
    } else {
      CHECK(r.score.exact_match);
    }
  }
  CHECK(parse_failures == 1);
  CHECK(missing == 1);
  const auto rows = aggregate_records(records);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].aggregate.acc_em == doctest::Approx(90.0));
}

TEST_CASE("config parsing") {
  testing::TempDir dir("config");
  const auto config = parse_config(R"({
    "name": "trial",
    "dataset": "data/set",
    "models": ["gpt-4o", {"name": "local", "provider": "mock", "temperature": 0.1}],
    "strategies": ["one_shot_cot"],
    "modes": ["dynamic"],
    "runs": 2,
    "acc_d": "edges",
    "structural_lines": "exclude"
  })", dir.path());
  CHECK(config.name == "trial");
  CHECK(config.dataset == dir.path() / "data/set");
  CHECK(config.output == dir.path() / "results/results.jsonl");
  REQUIRE(config.models.size() == 2);
  CHECK(config.models[0].temperature == doctest::Approx(0.7));
  CHECK(config.models[0].context_window == 8192);
  CHECK(config.models[1].provider == "mock");
  CHECK(config.strategies == std::vector<llm::Strategy>{llm::Strategy::OneShotCot});
  CHECK(config.modes == std::vector<slicing::Mode>{slicing::Mode::Dynamic});
  CHECK(config.acc_d == metrics::AccDMode::Edges);
  CHECK(config.structural == slicing::StructuralLines::Exclude);

  CHECK_THROWS_AS(parse_config("[]", dir.path()), llm::ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"models": ["gpt-4o"], "runs": 0})", dir.path()), llm::ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"models": []})", dir.path()), llm::ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"models": [{"name": "x", "temperature": 3}]})", dir.path()), llm::ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"models": ["gpt-4o"], "strategies": ["few_shot"]})", dir.path()), Error);
  CHECK_THROWS_AS(load_config(dir.path() / "none.json"), llm::ConfigError);
}

TEST_CASE("ingest lists rejected programs and keeps the rest") {
  testing::TempDir dir("ingest");
  const auto good = testing::read_file(testing::corpus_dir() / "programs" / "p09.java");
  testing::write_file(dir.path() / "programs" / "a.java", good);
  testing::write_file(dir.path() / "criteria" / "a.json", R"({"static": {"variable": "answer", "line": 13}})");
  testing::write_file(dir.path() / "programs" / "b.java",
                      "public class B {\n    public static int main(String[] args) {\n        Runnable r = () -> {};\n        return 0;\n    }\n}\n");
  testing::write_file(dir.path() / "criteria" / "b.json", R"({"static": {"variable": "r", "line": 3}})");
  testing::write_file(dir.path() / "programs" / "c.java", good);
  testing::write_file(dir.path() / "criteria" / "c.json", R"({"static": {"variable": "answer", "line": 2}})");
  testing::write_file(dir.path() / "programs" / "d.java", good);
  const auto ds = ingest_dataset(dir.path());
  std::map<std::string, std::string> skipped;
  for (const auto& s : ds.skipped) skipped[s.program_id] += s.kind + " ";
  CHECK(skipped.count("b") == 1);
  CHECK(skipped["b"].find("ParseError") != std::string::npos);
  CHECK(skipped.count("c") == 1);
  CHECK(ds.find_task("a:static") != nullptr);
  CHECK(ds.find_task("a:dynamic") != nullptr);
  CHECK(ds.find_task("d:dynamic") != nullptr);
  CHECK(ds.find_task("b:static") == nullptr);
}

TEST_CASE("ground truth cache") {
  testing::TempDir dir("cache");
  GroundTruthOptions options;
  options.cache_dir = dir.path();
  GroundTruthStats first, second, other_stats;
  const auto fresh = gen_ground_truth(corpus(), options, &first);
  const auto cached = gen_ground_truth(corpus(), options, &second);
  CHECK(first.computed == 40);
  CHECK(first.cache_hits == 0);
  CHECK(second.cache_hits == 40);
  CHECK(cached.at("p05:static").from_cache);
  for (const auto& [id, gt] : fresh) CHECK(cached.at(id).lines == gt.lines);

  auto other = options;
  other.structural = slicing::StructuralLines::Exclude;
  const auto& program = corpus().program("p05");
  const auto& task = *corpus().find_task("p05:static");
  CHECK(ground_truth_key(program, task, other) != ground_truth_key(program, task, options));
  const auto excluded = gen_ground_truth(corpus(), other, &other_stats);
  CHECK(other_stats.cache_hits == 0);
  CHECK(excluded.at("p05:static").lines.size() < fresh.at("p05:static").lines.size());
}

TEST_CASE("report tables and the static vs dynamic test") {
  std::vector<ExperimentRecord> records;
  const std::vector<std::pair<std::string, double>> cells = {{"static", 0.25}, {"static", 0.5}, {"dynamic", 0.75},
                                                             {"dynamic", 1.0}};
  for (const auto& [mode, acc] : cells) {
    for (const std::string strategy : {"zero_shot", "one_shot"}) {
      ExperimentRecord r;
      r.experiment = "vanilla";
      r.model = "gpt-4o";
      r.mode = mode;
      r.strategy = strategy;
      r.task_id = "t" + std::to_string(records.size()) + ":" + mode;
      r.score = {r.task_id, acc == 1.0, strategy == "zero_shot" ? acc : acc / 2, false};
      records.push_back(r);
    }
  }
  const auto rows = aggregate_records(records);
  REQUIRE(rows.size() == 4);
  const auto text = render_tables(rows);
  CHECK(text.find("gpt-4o") != std::string::npos);
  CHECK(text.find("37.50") != std::string::npos);
  const auto json = rows_to_json(rows);
  CHECK(json.size() == 4);
  const auto test = static_vs_dynamic(rows, "vanilla");
  REQUIRE(test.has_value());
  CHECK(test->u_statistic + test->u_other == doctest::Approx(4.0));
  CHECK_FALSE(static_vs_dynamic(rows, "crafted").has_value());
}

namespace {

/// Returns the ground truth for experiments named in `fixed`, and the truth
/// minus its first line everywhere else.
class ImprovingProvider : public llm::Provider {
 public:
  explicit ImprovingProvider(std::set<std::string> fixed) : fixed_(std::move(fixed)) {}
  llm::Completion complete(const std::string& prompt, const llm::ModelConfig&, const llm::CallContext& ctx) override {
    std::lock_guard lock(mutex);
    prompts[ctx.experiment + "|" + ctx.task_id] = prompt;
    auto lines = truth().at(ctx.task_id).lines;
    if (!fixed_.count(ctx.experiment)) lines.erase(lines.begin());
    return {llm::render_output(lines), {}};
  }
  std::mutex mutex;
  std::map<std::string, std::string> prompts;

 private:
  std::set<std::string> fixed_;
};

ProviderFactory borrow(llm::Provider* p) { return with(p).provider_factory; }

}  // namespace

TEST_CASE("crafted re-run against the vanilla baseline") {
  testing::TempDir dir("crafted");
  auto config = config_in(dir);
  config.strategies = {llm::Strategy::OneShotCot};
  config.modes = {slicing::Mode::Static};
  ImprovingProvider provider({"crafted"});
  run_experiment(config, corpus(), truth(), with(&provider));
  const auto baseline = load_records(config.output);
  const auto result = run_crafted(config, corpus(), truth(), baseline, improve::default_crafted_example(), with(&provider));
  REQUIRE(result.rows.size() == 1);
  const auto& row = result.rows[0];
  CHECK(row.strategy == "crafted");
  CHECK(row.improved == doctest::Approx(100.0));
  CHECK(row.delta == doctest::Approx(100.0 - row.vanilla));
  CHECK(provider.prompts.at("crafted|p01:static").find("best@15") != std::string::npos);
  CHECK_THROWS_AS(run_crafted(config, corpus(), truth(), {}, improve::default_crafted_example(), with(&provider)),
                  improve::BaselineMissing);
}

TEST_CASE("iterative re-prompting stops once a task is fixed") {
  testing::TempDir dir("iterative");
  auto config = config_in(dir);
  config.strategies = {llm::Strategy::OneShotCot};
  config.modes = {slicing::Mode::Static};
  config.max_iterations = 3;
  ImprovingProvider provider({"iterative-2"});
  run_experiment(config, corpus(), truth(), with(&provider));
  const auto baseline = load_records(config.output);

  taxonomy::LabelStore labels(config.labels);
  for (const std::string task : {"p01:static", "p02:static", "p03:static", "p04:static"}) {
    taxonomy::FailureLabel l;
    l.task_id = task;
    l.root_cause = taxonomy::cause_from_code("C2");
    l.locations = {taxonomy::FaultLocation::LoopConstructs};
    l.reviewer = "alice";
    labels.record_label(l);
  }
  const auto result = run_iterative(config, corpus(), truth(), baseline, labels, borrow(&provider));
  CHECK(result.iterations.size() == 8);
  for (const auto& it : result.iterations) {
    CHECK(it.iteration <= 2);
    CHECK(it.prompt.find("Feedback on your") != std::string::npos);
    CHECK(metrics::is_failure(it.score) == (it.iteration == 1));
  }
  REQUIRE(result.rows.size() == 1);
  double expected = 0;
  for (const std::string task : {"p01:static", "p02:static", "p03:static", "p04:static"}) {
    const double n = static_cast<double>(truth().at(task).lines.size());
    expected += 100.0 / 20.0 * (1.0 - (n - 1) / n);
  }
  CHECK(result.rows[0].delta == doctest::Approx(expected));
  CHECK(load_iterations(config.iterations).size() == 8);

  // A second invocation finds every labeled task already fixed.
  const auto again = run_iterative(config, corpus(), truth(), baseline, labels, borrow(&provider));
  CHECK(again.iterations.empty());
  CHECK(again.rows[0].delta == doctest::Approx(expected));
}
