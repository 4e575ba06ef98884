#include <doctest.h>

#include <httplib.h>

#include <future>
#include <thread>

#include "slicebench/harness/server.hpp"
#include "support.hpp"

using namespace slicebench;
using namespace slicebench::harness;
using nlohmann::json;

namespace {

const Dataset& corpus() {
  static const Dataset ds = ingest_dataset(testing::corpus_dir());
  return ds;
}

const std::map<std::string, GroundTruth>& truth() {
  static const auto t = gen_ground_truth(corpus(), {});
  return t;
}

/// Vanilla answers miss a line on odd-numbered programs; re-prompts are exact.
class ScriptedProvider : public llm::Provider {
 public:
  llm::Completion complete(const std::string&, const llm::ModelConfig&, const llm::CallContext& ctx) override {
    auto lines = truth().at(ctx.task_id).lines;
    const int number = std::stoi(ctx.task_id.substr(1, 2));
    if (ctx.experiment == "vanilla" && number % 2 == 1) lines.erase(lines.begin());
    return {llm::render_output(lines), {}};
  }
};

ProviderFactory scripted() {
  return [](const llm::ModelConfig&) { return std::make_unique<ScriptedProvider>(); };
}

class Running {
 public:
  explicit Running(const ServerOptions& options) : service_(options, corpus(), truth()) {
    std::promise<int> bound;
    auto port = bound.get_future();
    thread_ = std::thread([this, &bound] { service_.listen("127.0.0.1", 0, [&](int p) { bound.set_value(p); }); });
    port_ = port.get();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  ~Running() {
    service_.stop();
    thread_.join();
  }

  httplib::Client& client() { return *client_; }

 private:
  TriageService service_;
  std::thread thread_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

json body(const httplib::Result& r) { return json::parse(r->body); }

}  // namespace

TEST_CASE("triage API end to end") {
  testing::TempDir dir("server");
  ExperimentConfig config;
  llm::ModelConfig model;
  model.name = "gpt-4o";
  model.provider = "mock";
  config.models = {model};
  config.strategies = {llm::Strategy::OneShotCot};
  config.runs = 1;
  config.dataset = testing::corpus_dir();
  config.output = dir.path() / "results.jsonl";
  config.labels = dir.path() / "labels.jsonl";
  config.iterations = dir.path() / "iterations.jsonl";
  RunOptions run;
  run.provider_factory = scripted();
  run_experiment(config, corpus(), truth(), run);

  ServerOptions options{config, {}, scripted()};
  {
    Running server(options);
    auto& c = server.client();

    auto r = c.Get("/api/tasks");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(body(r).size() == 40);
    r = c.Get("/api/tasks?failed=true");
    CHECK(body(r).size() == 20);
    for (const auto& t : body(r)) CHECK(t["failed"].get<bool>());

    CHECK(c.Get("/api/tasks/p99:static")->status == 404);
    r = c.Get("/api/tasks/p01:static");
    REQUIRE(r->status == 200);
    auto detail = body(r);
    CHECK(detail["prediction"]["origin"] == "vanilla run 1");
    CHECK(detail["diff"]["missed"].size() == 1);
    CHECK(detail["diff"]["extra"].empty());
    CHECK(detail["source"].size() > 5);

    const std::string label = R"({"root_cause": "C2", "locations": ["A2", "A4"], "reviewer": "alice"})";
    CHECK(c.Post("/api/tasks/p02:static/label", label, "application/json")->status == 422);
    CHECK(c.Post("/api/tasks/p99:static/label", label, "application/json")->status == 404);
    CHECK(c.Post("/api/tasks/p01:static/label", R"({"root_cause": "Z1", "locations": ["A2"]})", "application/json")
              ->status == 400);
    CHECK(c.Post("/api/tasks/p01:static/label", "not json", "application/json")->status == 400);
    CHECK(c.Post("/api/tasks/p01:static/reprompt", "", "application/json")->status == 422);

    r = c.Post("/api/tasks/p01:static/label", label, "application/json");
    CHECK(r->status == 201);
    CHECK(body(r)["version"] == 1);

    r = c.Post("/api/tasks/p01:static/label", R"({"root_cause": "B2", "locations": ["A2"], "reviewer": "bob"})",
               "application/json");
    CHECK(r->status == 409);
    CHECK(c.Post("/api/tasks/p01:static/reprompt", "", "application/json")->status == 409);
    CHECK(body(c.Get("/api/report"))["disagreements"] == json::array({"p01:static"}));

    r = c.Post("/api/tasks/p01:static/resolve", R"({"root_cause": "C2", "locations": ["A4"], "resolver": "carol"})",
               "application/json");
    CHECK(r->status == 201);
    CHECK(c.Post("/api/tasks/p99:static/resolve", "{}", "application/json")->status == 404);

    r = c.Post("/api/tasks/p01:static/reprompt", "", "application/json");
    REQUIRE(r->status == 201);
    auto iteration = body(r);
    CHECK(iteration["iteration"] == 1);
    CHECK(iteration["score"]["acc_d"] == 1.0);
    CHECK(iteration["prompt"].get<std::string>().find("Complex Control Flow") != std::string::npos);

    r = c.Get("/api/tasks/p01:static/iterations");
    CHECK(body(r).size() == 1);
    detail = body(c.Get("/api/tasks/p01:static"));
    CHECK(detail["prediction"]["origin"] == "iteration 1");
    CHECK(detail["diff"]["missed"].empty());
    CHECK(detail["pending"] == false);
    CHECK(detail["label"]["root_cause"] == "C2");
    CHECK(detail["label_history"].size() == 2);
    CHECK(detail["resolutions"].size() == 1);

    const auto report = body(c.Get("/api/report"));
    CHECK(report["distribution"]["total"] == 1);
    CHECK(report["distribution"]["root_causes"]["C2"] == 1);
    CHECK(report["disagreements"].empty());
    CHECK(report["iterative"]["delta"].get<double>() > 0.0);
    CHECK(report["aggregates"].size() == 2);
    CHECK(report.contains("static_vs_dynamic"));

    r = c.Get("/");
    CHECK(r->status == 200);
  }

  // State survives a restart.
  Running again(options);
  const auto detail = body(again.client().Get("/api/tasks/p01:static"));
  CHECK(detail["iterations"] == 1);
  CHECK(detail["label"]["root_cause"] == "C2");
}
