#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "slicebench/harness/improvement.hpp"

namespace httplib {
class Server;
}

namespace slicebench::harness {

struct ServerOptions {
  ExperimentConfig config;
  std::filesystem::path static_dir;  // optional triage UI assets, served at /
  ProviderFactory provider_factory;  // defaults to llm::make_provider over config.fixtures
};

/// Triage API over one experiment's results, the label store and the
/// iteration log. The vanilla one-shot CoT run 1 of the first configured
/// model is the prediction under review until a re-prompt supersedes it.
class TriageService {
 public:
  TriageService(ServerOptions options, Dataset dataset, std::map<std::string, GroundTruth> truth);
  ~TriageService();

  /// Installs the /api routes on `server`.
  void mount(httplib::Server& server);

  /// Blocks serving on host:port. port 0 picks a free port, reported through `on_bound`.
  bool listen(const std::string& host, int port, const std::function<void(int)>& on_bound = {});
  void stop();

  const std::string& model() const { return model_.name; }

 private:
  nlohmann::json task_summary(const SliceTask& task) const;
  nlohmann::json task_detail(const SliceTask& task) const;
  nlohmann::json report() const;
  std::optional<bool> failed_lookup(const std::string& task_id) const;

  ServerOptions options_;
  Dataset dataset_;
  std::map<std::string, GroundTruth> truth_;
  llm::ModelConfig model_;
  std::vector<ExperimentRecord> records_;
  taxonomy::LabelStore labels_;
  std::vector<improve::IterationRecord> iterations_;
  std::unique_ptr<RecordSink> iteration_sink_;
  std::unique_ptr<llm::Provider> provider_;
  mutable std::shared_mutex state_mutex_;  // guards iterations_
  std::mutex reprompt_mutex_;              // one re-prompt per service at a time keeps indices consecutive
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace slicebench::harness
