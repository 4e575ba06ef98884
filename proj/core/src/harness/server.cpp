#include "slicebench/harness/server.hpp"

#include <algorithm>
#include <httplib.h>
#include <set>

#include "slicebench/harness/report.hpp"

namespace slicebench::harness {

namespace {

const std::string kVanillaStrategy = llm::to_string(llm::Strategy::OneShotCot);

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(2), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
  reply(res, status, {{"error", kind}, {"message", message}});
}

nlohmann::json label_view(const taxonomy::TaskLabel& l) {
  auto locs = nlohmann::json::array();
  for (auto loc : l.locations) locs.push_back(taxonomy::code(loc));
  return {{"root_cause", taxonomy::code(l.root_cause)},
          {"root_cause_name", taxonomy::display_name(l.root_cause)},
          {"category", taxonomy::category_name(l.root_cause)},
          {"locations", locs}};
}

std::vector<taxonomy::FaultLocation> parse_locations(const nlohmann::json& j) {
  if (!j.is_array()) throw taxonomy::TaxonomyError("InvalidLabel", "locations must be an array of codes");
  std::vector<taxonomy::FaultLocation> out;
  for (const auto& l : j) {
    if (!l.is_string()) throw taxonomy::TaxonomyError("InvalidLabel", "locations must be an array of codes");
    out.push_back(taxonomy::location_from_code(l.get<std::string>()));
  }
  return out;
}

std::vector<int> lines_of(const std::optional<std::vector<int>>& v) { return v ? *v : std::vector<int>{}; }

}  // namespace

TriageService::TriageService(ServerOptions options, Dataset dataset, std::map<std::string, GroundTruth> truth)
    : options_(std::move(options)),
      dataset_(std::move(dataset)),
      truth_(std::move(truth)),
      labels_(options_.config.labels) {
  options_.config.validate();
  model_ = options_.config.models.front();
  records_ = load_records(options_.config.output);
  iterations_ = load_iterations(options_.config.iterations);
  iteration_sink_ = std::make_unique<RecordSink>(options_.config.iterations);
  provider_ = options_.provider_factory ? options_.provider_factory(model_)
                                        : llm::make_provider(model_, options_.config.fixtures);
}

TriageService::~TriageService() = default;

std::optional<bool> TriageService::failed_lookup(const std::string& task_id) const {
  if (!dataset_.find_task(task_id)) return std::nullopt;
  auto failed = baseline_failed(records_, model_.name, task_id);
  return failed.value_or(false);
}

nlohmann::json TriageService::task_summary(const SliceTask& task) const {
  nlohmann::json j = {{"task_id", task.task_id},
                      {"program_id", task.program_id},
                      {"mode", slicing::to_string(task.criterion.mode)},
                      {"criterion", slicing::to_string(task.criterion)}};
  const ExperimentRecord* base = nullptr;
  for (const auto& r : records_) {
    if (r.experiment == kVanilla && r.model == model_.name && r.strategy == kVanillaStrategy &&
        r.task_id == task.task_id && r.run == 1)
      base = &r;
  }
  const improve::IterationRecord* last = nullptr;
  for (const auto& it : iterations_) {
    if (it.task_id == task.task_id && it.model == model_.name && (!last || it.iteration > last->iteration)) last = &it;
  }
  j["baseline"] = base ? nlohmann::json{{"exact_match", base->score.exact_match},
                                         {"acc_d", base->score.acc_d},
                                         {"parse_failed", base->score.parse_failed}}
                       : nlohmann::json(nullptr);
  j["failed"] = base && metrics::is_failure(base->score);
  const metrics::TaskScore* current = last ? &last->score : base ? &base->score : nullptr;
  j["current"] = current ? nlohmann::json{{"exact_match", current->exact_match}, {"acc_d", current->acc_d}}
                         : nlohmann::json(nullptr);
  j["pending"] = current && metrics::is_failure(*current);
  j["iterations"] = last ? last->iteration : 0;
  const auto label = labels_.effective(task.task_id);
  j["label"] = label ? label_view(*label) : nlohmann::json(nullptr);
  const auto dis = labels_.disagreements();
  j["disagreement"] = std::find(dis.begin(), dis.end(), task.task_id) != dis.end();
  return j;
}

nlohmann::json TriageService::task_detail(const SliceTask& task) const {
  auto j = task_summary(task);
  const auto& program = dataset_.program(task.program_id);
  auto source = nlohmann::json::array();
  for (int n = 1; n <= program.source().line_count(); ++n) source.push_back(std::string(program.source().line(n)));
  j["source"] = source;
  const auto gt = truth_.find(task.task_id);
  const std::vector<int> truth = gt != truth_.end() ? gt->second.lines : std::vector<int>{};
  j["ground_truth"] = truth;

  nlohmann::json prediction = nullptr;
  std::vector<int> predicted;
  const improve::IterationRecord* last = nullptr;
  for (const auto& it : iterations_) {
    if (it.task_id == task.task_id && it.model == model_.name && (!last || it.iteration > last->iteration)) last = &it;
  }
  if (last) {
    auto parsed = llm::parse_slice_response(last->response, program.source().line_count());
    if (auto* s = std::get_if<llm::ParsedSlice>(&parsed)) predicted = s->lines;
    prediction = {{"origin", "iteration " + std::to_string(last->iteration)},
                  {"raw_response", last->response},
                  {"lines", predicted}};
  } else {
    for (const auto& r : records_) {
      if (r.experiment == kVanilla && r.model == model_.name && r.strategy == kVanillaStrategy &&
          r.task_id == task.task_id && r.run == 1) {
        predicted = lines_of(r.predicted);
        prediction = {{"origin", "vanilla run 1"}, {"raw_response", r.raw_response}, {"lines", predicted},
                      {"failure", r.failure ? nlohmann::json(llm::to_string(r.failure->kind)) : nlohmann::json(nullptr)}};
      }
    }
  }
  j["prediction"] = prediction;
  std::vector<int> both, missed, extra;
  std::set_intersection(predicted.begin(), predicted.end(), truth.begin(), truth.end(), std::back_inserter(both));
  std::set_difference(truth.begin(), truth.end(), predicted.begin(), predicted.end(), std::back_inserter(missed));
  std::set_difference(predicted.begin(), predicted.end(), truth.begin(), truth.end(), std::back_inserter(extra));
  j["diff"] = {{"both", both}, {"missed", missed}, {"extra", extra}};

  auto history = nlohmann::json::array();
  for (const auto& l : labels_.history(task.task_id)) history.push_back(l);
  j["label_history"] = history;
  auto resolutions = nlohmann::json::array();
  for (const auto& r : labels_.resolutions(task.task_id)) resolutions.push_back(r);
  j["resolutions"] = resolutions;
  return j;
}

nlohmann::json TriageService::report() const {
  const auto rows = aggregate_records(records_);
  nlohmann::json j;
  j["aggregates"] = rows_to_json(rows);
  j["tables"] = render_tables(rows);
  if (auto test = static_vs_dynamic(rows, kVanilla)) {
    j["static_vs_dynamic"] = {{"u", test->u_statistic}, {"p_value", test->p_value}, {"method", test->method}};
  }
  const auto dis = labels_.disagreements();
  std::vector<taxonomy::TaskLabel> settled;
  for (const auto& id : labels_.labeled_tasks()) {
    if (std::find(dis.begin(), dis.end(), id) != dis.end()) continue;
    if (auto l = labels_.effective(id)) settled.push_back(*l);
  }
  const auto d = taxonomy::distribution(settled);
  j["distribution"] = {{"total", d.total},
                       {"root_causes", d.root_causes},
                       {"locations", d.locations},
                       {"location_memberships", d.location_memberships}};
  auto flows = nlohmann::json::array();
  for (const auto& f : taxonomy::flow_map(settled)) {
    flows.push_back({{"root_cause", f.root_cause}, {"location", f.location}, {"count", f.count}});
  }
  j["flow_map"] = flows;
  j["disagreements"] = dis;
  const auto base = runs_of(records_, kVanilla, model_.name, kVanillaStrategy, "");
  if (!base.empty()) {
    std::shared_lock lock(state_mutex_);
    auto row = improve::improvement_delta(model_.name, "iterative", base,
                                          apply_iterations(base, iterations_, model_.name));
    j["iterative"] = {{"model", row.model}, {"vanilla", row.vanilla}, {"improved", row.improved}, {"delta", row.delta}};
  }
  return j;
}

void TriageService::mount(httplib::Server& server) {
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      reply_error(res, 500, "InternalError", e.what());
    }
  });

  server.Get("/api/tasks", [this](const httplib::Request& req, httplib::Response& res) {
    const bool failed_only = req.get_param_value("failed") == "true";
    auto out = nlohmann::json::array();
    std::shared_lock lock(state_mutex_);
    for (const auto& task : dataset_.tasks) {
      auto s = task_summary(task);
      if (failed_only && !s["failed"].get<bool>()) continue;
      out.push_back(std::move(s));
    }
    reply(res, 200, out);
  });

  server.Get(R"(/api/tasks/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto* task = dataset_.find_task(req.matches[1]);
    if (!task) return reply_error(res, 404, "UnknownTask", "unknown task '" + std::string(req.matches[1]) + "'");
    std::shared_lock lock(state_mutex_);
    reply(res, 200, task_detail(*task));
  });

  server.Post(R"(/api/tasks/([^/]+)/label)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) return reply_error(res, 400, "BadRequest", "body must be a JSON object");
    taxonomy::FailureLabel label;
    try {
      label.task_id = id;
      label.root_cause = taxonomy::cause_from_code(body.value("root_cause", ""));
      label.locations = parse_locations(body.value("locations", nlohmann::json::array()));
      label.reviewer = body.value("reviewer", "");
      label.notes = body.value("notes", "");
      const auto outcome = labels_.record_label(label, [this](const std::string& t) { return failed_lookup(t); });
      nlohmann::json j = outcome.label;
      j["disagreement"] = outcome.disagreement;
      reply(res, outcome.disagreement ? 409 : 201, j);
    } catch (const taxonomy::TaxonomyError& e) {
      const int status = e.kind() == "UnknownTask" ? 404 : e.kind() == "NotAFailure" ? 422 : 400;
      reply_error(res, status, e.kind(), e.what());
    }
  });

  server.Post(R"(/api/tasks/([^/]+)/resolve)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!dataset_.find_task(id)) return reply_error(res, 404, "UnknownTask", "unknown task '" + id + "'");
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) return reply_error(res, 400, "BadRequest", "body must be a JSON object");
    try {
      taxonomy::Resolution r;
      r.task_id = id;
      r.root_cause = taxonomy::cause_from_code(body.value("root_cause", ""));
      r.locations = parse_locations(body.value("locations", nlohmann::json::array()));
      r.resolver = body.value("resolver", "");
      r.notes = body.value("notes", "");
      labels_.resolve(r);
      reply(res, 201, label_view(*labels_.effective(id)));
    } catch (const taxonomy::TaxonomyError& e) {
      reply_error(res, 400, e.kind(), e.what());
    }
  });

  server.Post(R"(/api/tasks/([^/]+)/reprompt)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!dataset_.find_task(id)) return reply_error(res, 404, "UnknownTask", "unknown task '" + id + "'");
    const auto dis = labels_.disagreements();
    if (std::find(dis.begin(), dis.end(), id) != dis.end()) {
      return reply_error(res, 409, "UnresolvedDisagreement", "reviewers disagree on " + id + "; resolve first");
    }
    const auto label = labels_.effective(id);
    if (!label) return reply_error(res, 422, "MissingLabel", "task " + id + " has no failure label");
    std::lock_guard serial(reprompt_mutex_);
    std::vector<improve::IterationRecord> history;
    {
      std::shared_lock lock(state_mutex_);
      history = iterations_;
    }
    try {
      RepromptInputs in{&dataset_, &truth_, &model_, provider_.get(), options_.config.acc_d};
      auto rec = reprompt_once(in, records_, history, id, &*label);
      iteration_sink_->append(rec);
      {
        std::unique_lock lock(state_mutex_);
        iterations_.push_back(rec);
      }
      reply(res, 201, rec);
    } catch (const improve::BaselineMissing& e) {
      reply_error(res, 422, e.kind(), e.what());
    } catch (const Error& e) {
      reply_error(res, 502, e.kind(), e.what());
    }
  });

  server.Get(R"(/api/tasks/([^/]+)/iterations)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!dataset_.find_task(id)) return reply_error(res, 404, "UnknownTask", "unknown task '" + id + "'");
    auto out = nlohmann::json::array();
    std::shared_lock lock(state_mutex_);
    for (const auto& it : iterations_) {
      if (it.task_id == id && it.model == model_.name) out.push_back(it);
    }
    reply(res, 200, out);
  });

  server.Get("/api/report", [this](const httplib::Request&, httplib::Response& res) { reply(res, 200, report()); });

  if (!options_.static_dir.empty() && std::filesystem::is_directory(options_.static_dir)) {
    server.set_mount_point("/", options_.static_dir.string());
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("slicebench triage API: /api/tasks, /api/report\n", "text/plain");
    });
  }
}

bool TriageService::listen(const std::string& host, int port, const std::function<void(int)>& on_bound) {
  server_ = std::make_unique<httplib::Server>();
  mount(*server_);
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) return false;
  if (on_bound) on_bound(bound);
  return server_->listen_after_bind();
}

void TriageService::stop() {
  if (server_) server_->stop();
}

}  // namespace slicebench::harness
