#include "slicebench/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>

#include "slicebench/util/hash.hpp"
#include "slicebench/util/parallel.hpp"

namespace slicebench::harness {

void ExperimentConfig::validate() const {
  if (runs < 1) throw llm::ConfigError("runs must be at least 1");
  if (models.empty()) throw llm::ConfigError("config lists no models");
  if (strategies.empty()) throw llm::ConfigError("config lists no strategies");
  if (modes.empty()) throw llm::ConfigError("config lists no modes");
  if (concurrency < 1) throw llm::ConfigError("concurrency must be at least 1");
  if (max_iterations < 1) throw llm::ConfigError("max_iterations must be at least 1");
  for (const auto& m : models) m.validate();
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  const auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw llm::ConfigError("config is not a JSON object");
  ExperimentConfig c;
  auto path = [&](const char* key, const std::filesystem::path& fallback) {
    std::filesystem::path p = j.contains(key) ? std::filesystem::path(j[key].get<std::string>()) : fallback;
    return p.is_absolute() ? p : base_dir / p;
  };
  try {
    c.name = j.value("name", c.name);
    c.dataset = path("dataset", c.dataset);
    c.output = path("output", c.output);
    c.fixtures = path("fixtures", c.fixtures);
    c.cache_dir = path("cache_dir", c.cache_dir);
    c.labels = path("labels", c.labels);
    c.iterations = path("iterations", c.iterations);
    c.runs = j.value("runs", c.runs);
    c.concurrency = j.value("concurrency", c.concurrency);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    if (j.contains("acc_d")) c.acc_d = metrics::acc_d_mode_from_string(j["acc_d"].get<std::string>());
    if (j.contains("structural_lines")) {
      c.structural = slicing::structural_lines_from_string(j["structural_lines"].get<std::string>());
    }
    if (j.contains("models")) {
      for (const auto& m : j["models"]) {
        c.models.push_back(llm::apply_environment(m.is_string() ? nlohmann::json{{"name", m}}.get<llm::ModelConfig>()
                                                               : m.get<llm::ModelConfig>()));
      }
    }
    if (j.contains("strategies")) {
      c.strategies.clear();
      for (const auto& s : j["strategies"]) c.strategies.push_back(llm::strategy_from_string(s.get<std::string>()));
    }
    if (j.contains("modes")) {
      c.modes.clear();
      for (const auto& m : j["modes"]) c.modes.push_back(slicing::mode_from_string(m.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw llm::ConfigError(std::string("invalid config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw llm::ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string ExperimentRecord::key() const {
  return experiment + "|" + model + "|" + strategy + "|" + task_id + "|" + std::to_string(run);
}

void to_json(nlohmann::json& j, const ExperimentRecord& r) {
  j = nlohmann::json{{"experiment", r.experiment},
                     {"task_id", r.task_id},
                     {"program_id", r.program_id},
                     {"mode", r.mode},
                     {"criterion", r.criterion},
                     {"strategy", r.strategy},
                     {"model", r.model},
                     {"run", r.run},
                     {"prompt_hash", r.prompt_hash},
                     {"raw_response", r.raw_response},
                     {"predicted", r.predicted ? nlohmann::json(*r.predicted) : nlohmann::json(nullptr)},
                     {"failure", r.failure ? nlohmann::json{{"kind", llm::to_string(r.failure->kind)},
                                                            {"detail", r.failure->detail}}
                                           : nlohmann::json(nullptr)},
                     {"warnings", r.warnings},
                     {"ground_truth", r.ground_truth},
                     {"score", {{"exact_match", r.score.exact_match},
                                {"acc_d", r.score.acc_d},
                                {"parse_failed", r.score.parse_failed}}},
                     {"latency_ms", r.latency_ms},
                     {"prompt_tokens", r.prompt_tokens},
                     {"completion_tokens", r.completion_tokens},
                     {"retry_count", r.retry_count},
                     {"error_kind", r.error_kind},
                     {"error", r.error}};
}

void from_json(const nlohmann::json& j, ExperimentRecord& r) {
  r.experiment = j.at("experiment").get<std::string>();
  r.task_id = j.at("task_id").get<std::string>();
  r.program_id = j.value("program_id", metrics::program_of(r.task_id));
  r.mode = j.value("mode", "");
  r.criterion = j.value("criterion", "");
  r.strategy = j.at("strategy").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.run = j.at("run").get<int>();
  r.prompt_hash = j.value("prompt_hash", "");
  r.raw_response = j.value("raw_response", "");
  if (j.contains("predicted") && !j["predicted"].is_null()) r.predicted = j["predicted"].get<std::vector<int>>();
  if (j.contains("failure") && !j["failure"].is_null()) {
    r.failure = llm::ParseFailure{llm::parse_failure_kind_from_string(j["failure"].at("kind").get<std::string>()),
                                  j["failure"].value("detail", "")};
  }
  r.warnings = j.value("warnings", std::vector<std::string>{});
  r.ground_truth = j.value("ground_truth", std::vector<int>{});
  const auto& s = j.at("score");
  r.score.task_id = r.task_id;
  r.score.exact_match = s.value("exact_match", false);
  r.score.acc_d = s.value("acc_d", 0.0);
  r.score.parse_failed = s.value("parse_failed", false);
  r.latency_ms = j.value("latency_ms", 0.0);
  r.prompt_tokens = j.value("prompt_tokens", 0);
  r.completion_tokens = j.value("completion_tokens", 0);
  r.retry_count = j.value("retry_count", 0);
  r.error_kind = j.value("error_kind", "");
  r.error = j.value("error", "");
}

std::vector<ExperimentRecord> load_records(const std::filesystem::path& path) {
  std::vector<ExperimentRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(lines[i], nullptr, false);
    if (j.is_discarded()) {
      if (i + 1 == lines.size()) break;  // torn tail from an interrupted append
      throw Error("CorruptResults", path.string() + ":" + std::to_string(i + 1) + ": invalid JSON");
    }
    out.push_back(j.get<ExperimentRecord>());
  }
  return out;
}

RecordSink::RecordSink(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  // A torn tail from an interrupted append is dropped; a complete record that
  // only lacks its newline is terminated.
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::ostringstream ss;
  ss << in.rdbuf();
  in.close();
  const std::string text = ss.str();
  if (text.empty() || text.back() == '\n') return;
  const auto start = text.find_last_of('\n');
  const std::size_t keep = start == std::string::npos ? 0 : start + 1;
  if (nlohmann::json::parse(text.substr(keep), nullptr, false).is_discarded()) {
    std::filesystem::resize_file(path_, keep);
  } else {
    std::ofstream(path_, std::ios::app) << '\n';
  }
}

void RecordSink::append(const nlohmann::json& j) {
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app);
  out << j.dump() << '\n';
  out.flush();
  if (!out) throw Error("IoError", "cannot append to " + path_.string());
}

void score_record(ExperimentRecord& r, const ProgramEntry& program, metrics::AccDMode mode) {
  r.predicted.reset();
  r.failure.reset();
  r.warnings.clear();
  if (!r.error_kind.empty()) {
    r.score = metrics::parse_failure_score(r.task_id);
    return;
  }
  auto parsed = llm::parse_slice_response(r.raw_response, program.source().line_count());
  if (auto* f = std::get_if<llm::ParseFailure>(&parsed)) {
    r.failure = *f;
    r.score = metrics::parse_failure_score(r.task_id);
    return;
  }
  auto& slice = std::get<llm::ParsedSlice>(parsed);
  r.predicted = slice.lines;
  r.warnings = slice.warnings;
  std::set<metrics::LineEdge> edges;
  if (mode == metrics::AccDMode::Edges) edges = metrics::line_edges(*program.ast, *program.pdg);
  r.score = metrics::score_task(r.task_id, slice.lines, r.ground_truth, mode, &edges);
}

llm::PromptSpec prompt_spec(const ProgramEntry& program, const SliceTask& task, llm::Strategy strategy) {
  llm::PromptSpec spec;
  spec.mode = task.criterion.mode;
  spec.strategy = strategy;
  spec.program = &program.source();
  spec.criterion = task.criterion;
  return spec;
}

RunSummary run_experiment(const ExperimentConfig& config, const Dataset& dataset,
                          const std::map<std::string, GroundTruth>& truth, const RunOptions& options) {
  config.validate();
  const std::string experiment = options.experiment.empty() ? config.name : options.experiment;
  const PromptBuilder build = options.prompt_builder ? options.prompt_builder : PromptBuilder(llm::build_prompt);
  const ProviderFactory factory = options.provider_factory
                                      ? options.provider_factory
                                      : ProviderFactory([&](const llm::ModelConfig& m) {
                                          return llm::make_provider(m, config.fixtures);
                                        });

  std::set<std::string> done;
  for (const auto& r : load_records(config.output)) done.insert(r.key());

  struct Job {
    const llm::ModelConfig* model;
    llm::Strategy strategy;
    const SliceTask* task;
    int run;
  };
  RunSummary summary;
  std::vector<Job> jobs;
  for (const auto& task : dataset.tasks) {
    auto it = truth.find(task.task_id);
    if (it == truth.end() || !it->second.ok()) summary.tasks_without_truth.push_back(task.task_id);
  }
  for (const auto& model : config.models) {
    for (auto strategy : config.strategies) {
      for (auto mode : config.modes) {
        for (const auto& task : dataset.tasks) {
          if (task.criterion.mode != mode) continue;
          auto it = truth.find(task.task_id);
          if (it == truth.end() || !it->second.ok()) continue;
          for (int run = 1; run <= config.runs; ++run) {
            ++summary.total;
            ExperimentRecord probe;
            probe.experiment = experiment;
            probe.model = model.name;
            probe.strategy = llm::to_string(strategy);
            probe.task_id = task.task_id;
            probe.run = run;
            if (done.count(probe.key())) {
              ++summary.resumed;
              continue;
            }
            jobs.push_back({&model, strategy, &task, run});
          }
        }
      }
    }
  }
  if (options.stop_after && jobs.size() > *options.stop_after) jobs.resize(*options.stop_after);

  std::map<std::string, std::unique_ptr<llm::Provider>> providers;
  for (const auto& m : config.models) providers[m.name] = factory(m);

  RecordSink sink(config.output);
  std::atomic<std::size_t> errors{0};
  util::parallel_for(jobs.size(), static_cast<std::size_t>(config.concurrency), [&](std::size_t i) {
    const Job& job = jobs[i];
    const auto& program = dataset.program(job.task->program_id);
    ExperimentRecord r;
    r.experiment = experiment;
    r.task_id = job.task->task_id;
    r.program_id = job.task->program_id;
    r.mode = slicing::to_string(job.task->criterion.mode);
    r.criterion = slicing::to_string(job.task->criterion);
    r.strategy = llm::to_string(job.strategy);
    r.model = job.model->name;
    r.run = job.run;
    r.ground_truth = truth.at(job.task->task_id).lines;
    try {
      const std::string prompt = build(prompt_spec(program, *job.task, job.strategy));
      r.prompt_hash = util::sha256_hex(prompt);
      const auto completion =
          providers.at(job.model->name)->complete(prompt, *job.model, {experiment, r.task_id, r.strategy});
      r.raw_response = completion.text;
      r.latency_ms = completion.record.latency_ms;
      r.prompt_tokens = completion.record.prompt_tokens;
      r.completion_tokens = completion.record.completion_tokens;
      r.retry_count = completion.record.retry_count;
    } catch (const Error& e) {
      r.error_kind = e.kind();
      r.error = e.what();
      ++errors;
    }
    score_record(r, program, config.acc_d);
    sink.append(r);
  });
  summary.executed = jobs.size();
  summary.errors = errors;
  return summary;
}

}  // namespace slicebench::harness
