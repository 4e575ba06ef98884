#include "slicebench/harness/improvement.hpp"

#include <fstream>

#include "slicebench/harness/report.hpp"

namespace slicebench::improve {

namespace {

nlohmann::json label_json(const taxonomy::TaskLabel& l) {
  auto locs = nlohmann::json::array();
  for (auto loc : l.locations) locs.push_back(taxonomy::code(loc));
  return {{"task_id", l.task_id}, {"root_cause", taxonomy::code(l.root_cause)}, {"locations", locs}};
}

taxonomy::TaskLabel label_from_json(const nlohmann::json& j) {
  taxonomy::TaskLabel l;
  l.task_id = j.at("task_id").get<std::string>();
  l.root_cause = taxonomy::cause_from_code(j.at("root_cause").get<std::string>());
  for (const auto& loc : j.at("locations")) l.locations.push_back(taxonomy::location_from_code(loc.get<std::string>()));
  return l;
}

}  // namespace

void to_json(nlohmann::json& j, const IterationRecord& r) {
  j = nlohmann::json{{"task_id", r.task_id},
                     {"model", r.model},
                     {"iteration", r.iteration},
                     {"prior_response", r.prior_response},
                     {"feedback", label_json(r.feedback)},
                     {"prompt", r.prompt},
                     {"response", r.response},
                     {"score", {{"exact_match", r.score.exact_match},
                                {"acc_d", r.score.acc_d},
                                {"parse_failed", r.score.parse_failed}}}};
}

void from_json(const nlohmann::json& j, IterationRecord& r) {
  r.task_id = j.at("task_id").get<std::string>();
  r.model = j.value("model", "");
  r.iteration = j.at("iteration").get<int>();
  r.prior_response = j.value("prior_response", "");
  r.feedback = label_from_json(j.at("feedback"));
  r.prompt = j.value("prompt", "");
  r.response = j.value("response", "");
  const auto& s = j.at("score");
  r.score.task_id = r.task_id;
  r.score.exact_match = s.value("exact_match", false);
  r.score.acc_d = s.value("acc_d", 0.0);
  r.score.parse_failed = s.value("parse_failed", false);
}

}  // namespace slicebench::improve

namespace slicebench::harness {

namespace {

const std::string kVanillaStrategy = llm::to_string(llm::Strategy::OneShotCot);

const ExperimentRecord* baseline_record(const std::vector<ExperimentRecord>& baseline, const std::string& model,
                                        const std::string& task_id) {
  const ExperimentRecord* found = nullptr;
  for (const auto& r : baseline) {
    if (r.experiment == kVanilla && r.model == model && r.strategy == kVanillaStrategy && r.task_id == task_id &&
        r.run == 1) {
      found = &r;
    }
  }
  return found;
}

}  // namespace

std::string iterative_experiment(int iteration) {
  return iteration <= 1 ? std::string("iterative") : "iterative-" + std::to_string(iteration);
}

std::vector<improve::IterationRecord> load_iterations(const std::filesystem::path& path) {
  std::vector<improve::IterationRecord> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;  // torn tail
    out.push_back(j.get<improve::IterationRecord>());
  }
  return out;
}

std::optional<bool> baseline_failed(const std::vector<ExperimentRecord>& baseline, const std::string& model,
                                    const std::string& task_id) {
  const auto* r = baseline_record(baseline, model, task_id);
  if (!r) return std::nullopt;
  return metrics::is_failure(r->score);
}

improve::IterationRecord reprompt_once(const RepromptInputs& in, const std::vector<ExperimentRecord>& baseline,
                                       const std::vector<improve::IterationRecord>& history,
                                       const std::string& task_id, const taxonomy::TaskLabel* label) {
  if (!label) throw improve::MissingLabel(task_id);
  const auto* task = in.dataset->find_task(task_id);
  if (!task) throw Error("UnknownTask", "unknown task '" + task_id + "'");
  const auto* base = baseline_record(baseline, in.model->name, task_id);
  if (!base) throw improve::BaselineMissing("no vanilla run-1 record of " + task_id + " for " + in.model->name);

  const improve::IterationRecord* last = nullptr;
  for (const auto& it : history) {
    if (it.task_id == task_id && it.model == in.model->name && (!last || it.iteration > last->iteration)) last = &it;
  }
  improve::IterationRecord rec;
  rec.task_id = task_id;
  rec.model = in.model->name;
  rec.iteration = last ? last->iteration + 1 : 1;
  rec.prior_response = last ? last->response : base->raw_response;
  rec.feedback = *label;

  const auto& program = in.dataset->program(task->program_id);
  const std::string original = llm::build_prompt(prompt_spec(program, *task, llm::Strategy::OneShotCot));
  rec.prompt = improve::iterative_reprompt(task_id, original, rec.prior_response, label, rec.iteration);
  rec.response =
      in.provider->complete(rec.prompt, *in.model, {iterative_experiment(rec.iteration), task_id, kVanillaStrategy}).text;

  ExperimentRecord scored;
  scored.task_id = task_id;
  scored.raw_response = rec.response;
  scored.ground_truth = in.truth->at(task_id).lines;
  score_record(scored, program, in.acc_d);
  rec.score = scored.score;
  return rec;
}

ImprovementResult run_crafted(const ExperimentConfig& config, const Dataset& dataset,
                              const std::map<std::string, GroundTruth>& truth,
                              const std::vector<ExperimentRecord>& baseline, const improve::CraftedExample& example,
                              const RunOptions& options) {
  ExperimentConfig crafted = config;
  crafted.strategies = {llm::Strategy::OneShotCot};
  RunOptions opts = options;
  opts.experiment = kCrafted;
  opts.prompt_builder = [&example](const llm::PromptSpec& spec) { return improve::craft_enhanced_prompt(spec, example); };

  ImprovementResult result;
  result.run = run_experiment(crafted, dataset, truth, opts);
  const auto records = load_records(config.output);
  for (const auto& model : config.models) {
    for (auto mode : config.modes) {
      const std::string m = slicing::to_string(mode);
      const auto base = runs_of(baseline, kVanilla, model.name, kVanillaStrategy, m);
      if (base.empty()) throw improve::BaselineMissing("no vanilla " + m + " results for " + model.name);
      auto row = improve::improvement_delta(model.name, kCrafted, base,
                                            runs_of(records, kCrafted, model.name, kVanillaStrategy, m));
      row.mode = m;
      result.rows.push_back(row);
    }
  }
  return result;
}

std::vector<std::vector<metrics::TaskScore>> apply_iterations(
    const std::vector<std::vector<metrics::TaskScore>>& baseline,
    const std::vector<improve::IterationRecord>& iterations, const std::string& model) {
  std::map<std::string, const improve::IterationRecord*> last;
  for (const auto& it : iterations) {
    if (it.model != model) continue;
    auto& slot = last[it.task_id];
    if (!slot || it.iteration > slot->iteration) slot = &it;
  }
  std::vector<metrics::TaskScore> rerun;
  for (const auto& [id, it] : last) rerun.push_back(it->score);
  return improve::merge_scores(baseline, std::vector<std::vector<metrics::TaskScore>>(baseline.size(), rerun));
}

ImprovementResult run_iterative(const ExperimentConfig& config, const Dataset& dataset,
                                const std::map<std::string, GroundTruth>& truth,
                                const std::vector<ExperimentRecord>& baseline, const taxonomy::LabelStore& labels,
                                const ProviderFactory& factory) {
  config.validate();
  ImprovementResult result;
  auto history = load_iterations(config.iterations);
  RecordSink sink(config.iterations);
  const auto labeled = labels.resolved_labels();

  for (const auto& model : config.models) {
    auto provider = factory ? factory(model) : llm::make_provider(model, config.fixtures);
    RepromptInputs in{&dataset, &truth, &model, provider.get(), config.acc_d};
    for (const auto& label : labeled) {
      const auto* task = dataset.find_task(label.task_id);
      if (!task || std::find(config.modes.begin(), config.modes.end(), task->criterion.mode) == config.modes.end())
        continue;
      if (!baseline_record(baseline, model.name, label.task_id)) continue;
      const improve::IterationRecord* last = nullptr;
      for (const auto& h : history) {
        if (h.task_id == label.task_id && h.model == model.name && (!last || h.iteration > last->iteration)) last = &h;
      }
      if (last && !metrics::is_failure(last->score)) continue;
      const int done = last ? last->iteration : 0;
      for (int k = done + 1; k <= config.max_iterations; ++k) {
        auto rec = reprompt_once(in, baseline, history, label.task_id, &label);
        sink.append(rec);
        history.push_back(rec);
        result.iterations.push_back(rec);
        if (!metrics::is_failure(rec.score)) break;
      }
    }
    for (auto mode : config.modes) {
      const std::string m = slicing::to_string(mode);
      const auto base = runs_of(baseline, kVanilla, model.name, kVanillaStrategy, m);
      if (base.empty()) throw improve::BaselineMissing("no vanilla " + m + " results for " + model.name);
      auto row = improve::improvement_delta(model.name, "iterative", base, apply_iterations(base, history, model.name));
      row.mode = m;
      result.rows.push_back(row);
    }
  }
  return result;
}

}  // namespace slicebench::harness
