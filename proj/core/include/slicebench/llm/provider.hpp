#pragma once

#include <filesystem>
#include <json.hpp>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "slicebench/error.hpp"

namespace slicebench::llm {

struct ModelConfig {
  std::string name;                 // roster name, e.g. "gpt-4o"
  std::string provider = "openai";  // "openai" or "mock"
  std::string model_id;             // wire model name; empty means `name`
  std::string endpoint = "https://api.openai.com/v1";
  std::string api_key_ref = "SLICEBENCH_API_KEY";
  double temperature = 0.7;
  int context_window = 8192;
  int max_retries = 3;
  double timeout_s = 60.0;
  int initial_backoff_ms = 500;
  double requests_per_second = 0.0;  // per endpoint; 0 disables the limiter

  /// Throws ConfigError when temperature is outside [0, 2] or the window is not positive.
  void validate() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

/// The four models of the study with their temperatures and context windows.
/// GPT-3.5 and Gemma have no stated temperature and default to 0.7.
std::vector<ModelConfig> reference_models();

/// Applies SLICEBENCH_API_BASE and SLICEBENCH_MODEL when set.
ModelConfig apply_environment(ModelConfig config);

/// ceil(chars / 4 * 1.1)
int estimate_tokens(std::string_view text);

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("ConfigError", message) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message) : Error("TransportError", message) {}
};

class RateLimited : public Error {
 public:
  explicit RateLimited(const std::string& message) : Error("RateLimited", message) {}
};

class ContextOverflow : public Error {
 public:
  ContextOverflow(int estimate, int window)
      : Error("ContextOverflow", "prompt needs about " + std::to_string(estimate) + " tokens but the context window is " +
                                     std::to_string(window)) {}
};

class FixtureMissing : public Error {
 public:
  explicit FixtureMissing(const std::string& path) : Error("FixtureMissing", "no mock fixture at " + path) {}
};

struct CallRecord {
  double latency_ms = 0.0;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int retry_count = 0;
};

struct Completion {
  std::string text;
  CallRecord record;
};

/// Identifies a call for fixture lookup and logging.
struct CallContext {
  std::string experiment;
  std::string task_id;
  std::string strategy;  // optional; narrows mock fixture lookup
};

class Provider {
 public:
  virtual ~Provider() = default;
  /// Throws ContextOverflow before any transport when the prompt cannot fit.
  virtual Completion complete(const std::string& prompt, const ModelConfig& config, const CallContext& ctx) = 0;
};

/// "p01:static" -> "p01__static.txt"
std::string fixture_file_name(const std::string& task_id);

/// Reads the first existing of <root>/<experiment>/<model>/<strategy>/<file>,
/// <root>/<experiment>/<model>/<file> and <root>/<experiment>/<file>.
class MockProvider : public Provider {
 public:
  explicit MockProvider(std::filesystem::path root) : root_(std::move(root)) {}
  Completion complete(const std::string& prompt, const ModelConfig& config, const CallContext& ctx) override;

 private:
  std::filesystem::path root_;
};

/// OpenAI-compatible chat completions with exponential backoff on transport
/// errors, 429 and 5xx responses.
class HttpProvider : public Provider {
 public:
  Completion complete(const std::string& prompt, const ModelConfig& config, const CallContext& ctx) override;
};

std::unique_ptr<Provider> make_provider(const ModelConfig& config, const std::filesystem::path& fixture_root);

}  // namespace slicebench::llm
