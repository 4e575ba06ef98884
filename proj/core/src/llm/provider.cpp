#include "slicebench/llm/provider.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <httplib.h>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace slicebench::llm {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void check_context(const std::string& prompt, const ModelConfig& config) {
  const int estimate = estimate_tokens(prompt);
  if (estimate > config.context_window) throw ContextOverflow(estimate, config.context_window);
}

/// Spaces requests to one endpoint at least 1/rps seconds apart.
class EndpointLimiter {
 public:
  void wait(const std::string& endpoint, double rps) {
    if (rps <= 0) return;
    const auto gap = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / rps));
    Clock::time_point slot;
    {
      std::lock_guard lock(mutex_);
      auto& next = next_[endpoint];
      const auto now = Clock::now();
      slot = std::max(next, now);
      next = slot + gap;
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  std::mutex mutex_;
  std::map<std::string, Clock::time_point> next_;
};

EndpointLimiter& limiter() {
  static EndpointLimiter l;
  return l;
}

}  // namespace

void ModelConfig::validate() const {
  if (name.empty()) throw ConfigError("model config without a name");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw ConfigError("temperature of " + name + " must be within [0, 2]");
  }
  if (context_window <= 0) throw ConfigError("context window of " + name + " must be positive");
  if (max_retries < 0) throw ConfigError("max_retries of " + name + " must not be negative");
  if (provider != "openai" && provider != "mock") throw ConfigError("unknown provider '" + provider + "'");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"name", c.name},
                     {"provider", c.provider},
                     {"model_id", c.model_id},
                     {"endpoint", c.endpoint},
                     {"api_key_ref", c.api_key_ref},
                     {"temperature", c.temperature},
                     {"context_window", c.context_window},
                     {"max_retries", c.max_retries},
                     {"timeout_s", c.timeout_s},
                     {"initial_backoff_ms", c.initial_backoff_ms},
                     {"requests_per_second", c.requests_per_second}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  c = ModelConfig{};
  c.name = j.at("name").get<std::string>();
  for (const auto& ref : reference_models()) {
    if (ref.name == c.name) c = ref;
  }
  c.provider = j.value("provider", c.provider);
  c.model_id = j.value("model_id", c.model_id);
  c.endpoint = j.value("endpoint", c.endpoint);
  c.api_key_ref = j.value("api_key_ref", c.api_key_ref);
  c.temperature = j.value("temperature", c.temperature);
  c.context_window = j.value("context_window", c.context_window);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.timeout_s = j.value("timeout_s", c.timeout_s);
  c.initial_backoff_ms = j.value("initial_backoff_ms", c.initial_backoff_ms);
  c.requests_per_second = j.value("requests_per_second", c.requests_per_second);
}

std::vector<ModelConfig> reference_models() {
  auto make = [](std::string name, double temperature, int window) {
    ModelConfig c;
    c.name = std::move(name);
    c.temperature = temperature;
    c.context_window = window;
    return c;
  };
  return {make("llama-2-7b-chat", 0.8, 4096), make("gemma-7b", 0.7, 8192), make("gpt-3.5-turbo", 0.7, 4096),
          make("gpt-4o", 0.7, 8192)};
}

ModelConfig apply_environment(ModelConfig config) {
  if (const char* base = std::getenv("SLICEBENCH_API_BASE"); base && *base) config.endpoint = base;
  if (const char* model = std::getenv("SLICEBENCH_MODEL"); model && *model) config.model_id = model;
  return config;
}

int estimate_tokens(std::string_view text) {
  return static_cast<int>((text.size() * 11 + 39) / 40);
}

std::string fixture_file_name(const std::string& task_id) {
  std::string out;
  for (char c : task_id) {
    if (c == ':') out += "__";
    else if (c == '/' || c == '\\') out += '_';
    else out += c;
  }
  return out + ".txt";
}

Completion MockProvider::complete(const std::string& prompt, const ModelConfig& config, const CallContext& ctx) {
  check_context(prompt, config);
  const auto start = Clock::now();
  const auto file = fixture_file_name(ctx.task_id);
  const auto base = root_ / ctx.experiment;
  std::vector<std::filesystem::path> candidates;
  if (!ctx.strategy.empty()) candidates.push_back(base / config.name / ctx.strategy / file);
  candidates.push_back(base / config.name / file);
  auto path = base / file;
  for (const auto& candidate : candidates) {
    if (std::filesystem::is_regular_file(candidate)) {
      path = candidate;
      break;
    }
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FixtureMissing(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Completion c;
  c.text = ss.str();
  c.record.prompt_tokens = estimate_tokens(prompt);
  c.record.completion_tokens = estimate_tokens(c.text);
  c.record.latency_ms = elapsed_ms(start);
  return c;
}

Completion HttpProvider::complete(const std::string& prompt, const ModelConfig& config, const CallContext& ctx) {
  (void)ctx;
  check_context(prompt, config);
  const auto scheme_end = config.endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must include a scheme: " + config.endpoint);
  const auto path_start = config.endpoint.find('/', scheme_end + 3);
  const std::string origin = config.endpoint.substr(0, path_start);
  std::string base_path = path_start == std::string::npos ? "" : config.endpoint.substr(path_start);
  while (!base_path.empty() && base_path.back() == '/') base_path.pop_back();

  httplib::Client client(origin);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::duration<double>(config.timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (const char* key = std::getenv(config.api_key_ref.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const nlohmann::json body = {
      {"model", config.model_id.empty() ? config.name : config.model_id},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", config.temperature},
  };
  const std::string payload = body.dump();

  const auto start = Clock::now();
  std::string last_error;
  bool rate_limited = false;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(config.initial_backoff_ms) * (1 << std::min(attempt - 1, 16)));
    }
    limiter().wait(origin, config.requests_per_second);
    auto res = client.Post(base_path + "/chat/completions", headers, payload, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      rate_limited = false;
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      rate_limited = res->status == 429;
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("HTTP " + std::to_string(res->status) + " from " + config.endpoint + ": " + res->body.substr(0, 200));
    }
    const auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
      throw TransportError("unexpected chat-completion payload from " + config.endpoint);
    }
    Completion c;
    const auto& msg = j["choices"][0]["message"];
    c.text = msg.contains("content") && msg["content"].is_string() ? msg["content"].get<std::string>() : "";
    c.record.retry_count = attempt;
    c.record.latency_ms = elapsed_ms(start);
    c.record.prompt_tokens = estimate_tokens(prompt);
    c.record.completion_tokens = estimate_tokens(c.text);
    if (j.contains("usage") && j["usage"].is_object()) {
      c.record.prompt_tokens = j["usage"].value("prompt_tokens", c.record.prompt_tokens);
      c.record.completion_tokens = j["usage"].value("completion_tokens", c.record.completion_tokens);
    }
    return c;
  }
  if (rate_limited) throw RateLimited("still rate limited after " + std::to_string(config.max_retries) + " retries");
  throw TransportError(last_error + " after " + std::to_string(config.max_retries) + " retries");
}

std::unique_ptr<Provider> make_provider(const ModelConfig& config, const std::filesystem::path& fixture_root) {
  config.validate();
  if (config.provider == "mock") return std::make_unique<MockProvider>(fixture_root);
  return std::make_unique<HttpProvider>();
}

}  // namespace slicebench::llm
