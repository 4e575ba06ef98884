#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <random>
#include <set>
#include <thread>

#include "slicebench/llm/prompt.hpp"
#include "slicebench/llm/provider.hpp"
#include "slicebench/llm/response_parser.hpp"
#include "support.hpp"

using namespace slicebench;
using namespace slicebench::llm;
using slicing::Mode;

namespace {

const ParsedSlice& ok(const ParseResult& r) {
  REQUIRE(std::holds_alternative<ParsedSlice>(r));
  return std::get<ParsedSlice>(r);
}

ParseFailureKind failure(const ParseResult& r) {
  REQUIRE(std::holds_alternative<ParseFailure>(r));
  return std::get<ParseFailure>(r).kind;
}

}  // namespace

TEST_CASE("prompts match the goldens byte for byte") {
  const auto dir = testing::source_dir() / "tests" / "golden";
  const frontend::SourceProgram program("target", testing::read_file(dir / "target.java"));
  for (Mode mode : {Mode::Static, Mode::Dynamic}) {
    for (Strategy strategy : {Strategy::ZeroShot, Strategy::OneShot, Strategy::OneShotCot}) {
      PromptSpec spec;
      spec.mode = mode;
      spec.strategy = strategy;
      spec.program = &program;
      spec.criterion = mode == Mode::Static ? slicing::SlicingCriterion{Mode::Static, "b", 5}
                                            : slicing::SlicingCriterion{Mode::Dynamic, "", 5};
      const std::string name = std::string(slicing::to_string(mode)) + "_" + to_string(strategy) + ".txt";
      INFO(name);
      CHECK(build_prompt(spec) == testing::read_file(dir / name));
    }
  }
}

TEST_CASE("prompt construction errors") {
  const frontend::SourceProgram program("p", "class A {}\n");
  PromptSpec spec;
  spec.program = &program;
  spec.criterion = {Mode::Static, "x", 1};
  spec.example = default_example(Mode::Static);
  CHECK_THROWS_AS(build_prompt(spec), TemplateError);
  spec.example.reset();
  spec.mode = Mode::Dynamic;
  CHECK_THROWS_AS(build_prompt(spec), TemplateError);
  const frontend::SourceProgram sneaky("q", "// <<<program>>>\nclass A {}\n");
  spec.mode = Mode::Static;
  spec.program = &sneaky;
  CHECK_THROWS_AS(build_prompt(spec), TemplateError);
  CHECK_THROWS_AS(substitute("<<<a>>> <<<b>>>", {{"a", "1"}}), TemplateError);
  CHECK(substitute("<<<a>>>-<<<a>>>", {{"a", "<<<a>>>"}}) == "<<<a>>>-<<<a>>>");
}

TEST_CASE("response parser fixtures") {
  CHECK(ok(parse_slice_response(R"({"output": ["3", "1", "3", "2"]})", 10)).lines == std::vector<int>{1, 2, 3});
  CHECK(ok(parse_slice_response("Sure!\n```json\n{\"output\": [4, 5]}\n```\nDone.", 10)).lines ==
        std::vector<int>{4, 5});
  CHECK(ok(parse_slice_response("reasoning {not json} then {\"output\": [\" 7 \"]}", 10)).lines ==
        std::vector<int>{7});
  CHECK(ok(parse_slice_response(R"({"answer": {"output": [2]}, "output": [1]})", 10)).lines == std::vector<int>{1});
  CHECK(ok(parse_slice_response(R"({"output": [2.0]})", 0)).lines == std::vector<int>{2});

  const auto dropped = ok(parse_slice_response(R"({"output": ["2", "99", "0"]})", 10));
  CHECK(dropped.lines == std::vector<int>{2});
  CHECK(dropped.warnings.size() == 2);

  CHECK(failure(parse_slice_response(R"({"lines": [1, 2]})", 10)) == ParseFailureKind::MissingOutputField);
  CHECK(failure(parse_slice_response(R"({"output": ["three"]})", 10)) == ParseFailureKind::NonNumericLine);
  CHECK(failure(parse_slice_response(R"({"output": [2.5]})", 10)) == ParseFailureKind::NonNumericLine);
  CHECK(failure(parse_slice_response(R"({"output": "1, 2"})", 10)) == ParseFailureKind::NonNumericLine);
  CHECK(failure(parse_slice_response(R"({"output": []})", 10)) == ParseFailureKind::EmptyOutput);
  CHECK(failure(parse_slice_response(R"({"output": ["50"]})", 10)) == ParseFailureKind::EmptyOutput);
  CHECK(failure(parse_slice_response("  \n ", 10)) == ParseFailureKind::EmptyOutput);
  CHECK(failure(parse_slice_response(R"({"output": ["1", "2")", 10)) == ParseFailureKind::MalformedJson);
  CHECK(failure(parse_slice_response("I cannot help with that.", 10)) == ParseFailureKind::MalformedJson);
}

TEST_CASE("parse failure kinds round-trip") {
  for (auto k : {ParseFailureKind::MalformedJson, ParseFailureKind::MissingOutputField, ParseFailureKind::NonNumericLine,
                 ParseFailureKind::EmptyOutput}) {
    CHECK(parse_failure_kind_from_string(to_string(k)) == k);
  }
}

TEST_CASE("parser fuzz: 1000 random responses") {
  std::mt19937_64 rng(0x5eed);
  const std::string pieces[] = {"{", "}", "[", "]", "\"", ",", ":", "output", "\"output\"", "```", "```json\n",
                                "1", "42", "-3", "1e400", "9999999999999", "2.5", "null", "true", " ", "\n", "\\",
                                "{\"output\": [", "\"7\"", "abc"};
  int wellformed = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    std::string raw;
    std::set<int> expected;
    if (iter % 2 == 0) {
      const int n = 1 + static_cast<int>(rng() % 8);
      raw = rng() % 2 ? "```json\n" : "Here you go: ";
      raw += "{\"output\": [";
      for (int k = 0; k < n; ++k) {
        const int line = 1 + static_cast<int>(rng() % 40);
        if (k) raw += ", ";
        raw += rng() % 2 ? std::to_string(line) : "\"" + std::to_string(line) + "\"";
        if (line <= 30) expected.insert(line);
      }
      raw += "]}";
      if (raw.front() == '`') raw += "\n```";
    } else {
      const int n = static_cast<int>(rng() % 30);
      for (int k = 0; k < n; ++k) raw += pieces[rng() % std::size(pieces)];
    }
    ParseResult result;
    CHECK_NOTHROW(result = parse_slice_response(raw, 30));
    if (const auto* slice = std::get_if<ParsedSlice>(&result)) {
      CHECK(std::is_sorted(slice->lines.begin(), slice->lines.end()));
      CHECK(std::adjacent_find(slice->lines.begin(), slice->lines.end()) == slice->lines.end());
      for (int l : slice->lines) CHECK((l >= 1 && l <= 30));
    }
    if (iter % 2 == 0) {
      if (expected.empty()) {
        CHECK(failure(result) == ParseFailureKind::EmptyOutput);
      } else {
        CHECK(ok(result).lines == std::vector<int>(expected.begin(), expected.end()));
        ++wellformed;
      }
    }
  }
  CHECK(wellformed > 400);
}

TEST_CASE("model config validation") {
  ModelConfig c;
  c.name = "m";
  CHECK_NOTHROW(c.validate());
  c.temperature = 2.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.temperature = 0.0;
  c.context_window = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.context_window = 10;
  c.provider = "carrier-pigeon";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.provider = "mock";
  c.name.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);

  const auto parsed = nlohmann::json::parse(R"({"name": "llama-2-7b-chat", "provider": "mock"})").get<ModelConfig>();
  CHECK(parsed.temperature == doctest::Approx(0.8));
  CHECK(parsed.context_window == 4096);
  CHECK(parsed.provider == "mock");
  CHECK(reference_models().size() == 4);
}

TEST_CASE("token estimate and context overflow") {
  CHECK(estimate_tokens("") == 0);
  CHECK(estimate_tokens("abcd") == 2);
  CHECK(estimate_tokens(std::string(400, 'x')) == 110);
  testing::TempDir dir("mock");
  ModelConfig c;
  c.name = "tiny";
  c.provider = "mock";
  c.context_window = 10;
  MockProvider mock(dir.path());
  CHECK_THROWS_AS(mock.complete(std::string(100, 'x'), c, {"vanilla", "p01:static", ""}), ContextOverflow);
}

TEST_CASE("mock provider prefers the most specific fixture") {
  testing::TempDir dir("mock");
  CHECK(fixture_file_name("p01:static") == "p01__static.txt");
  testing::write_file(dir.path() / "vanilla" / "p01__static.txt", "shared");
  testing::write_file(dir.path() / "vanilla" / "m" / "p01__static.txt", "model");
  testing::write_file(dir.path() / "vanilla" / "m" / "one_shot" / "p01__static.txt", "strategy");
  ModelConfig c;
  c.name = "m";
  c.provider = "mock";
  MockProvider mock(dir.path());
  CHECK(mock.complete("q", c, {"vanilla", "p01:static", "one_shot"}).text == "strategy");
  CHECK(mock.complete("q", c, {"vanilla", "p01:static", "zero_shot"}).text == "model");
  c.name = "other";
  CHECK(mock.complete("q", c, {"vanilla", "p01:static", ""}).text == "shared");
  CHECK_THROWS_AS(mock.complete("q", c, {"vanilla", "p02:static", ""}), FixtureMissing);
}

TEST_CASE("http provider retries server errors and reads the completion") {
  httplib::Server server;
  std::atomic<int> calls{0};
  std::string seen_auth, seen_model;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    const int n = ++calls;
    if (n == 1) {
      res.status = 500;
      return;
    }
    if (n == 2) {
      res.status = 429;
      return;
    }
    seen_auth = req.get_header_value("Authorization");
    seen_model = nlohmann::json::parse(req.body).at("model").get<std::string>();
    res.set_content(R"({"choices": [{"message": {"content": "{\"output\": [1]}"}}], "usage": {"prompt_tokens": 11, "completion_tokens": 3}})",
                    "application/json");
  });
  server.Post("/bad/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  server.Post("/busy/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 429; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("SLICEBENCH_TEST_KEY", "secret", 1);
  ModelConfig c;
  c.name = "gpt-4o";
  c.model_id = "wire-name";
  c.api_key_ref = "SLICEBENCH_TEST_KEY";
  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/";
  c.initial_backoff_ms = 1;
  c.max_retries = 3;
  HttpProvider http;
  const auto completion = http.complete("prompt", c, {});
  CHECK(completion.text == "{\"output\": [1]}");
  CHECK(completion.record.retry_count == 2);
  CHECK(completion.record.prompt_tokens == 11);
  CHECK(completion.record.completion_tokens == 3);
  CHECK(seen_auth == "Bearer secret");
  CHECK(seen_model == "wire-name");

  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/bad";
  CHECK_THROWS_AS(http.complete("prompt", c, {}), TransportError);
  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/busy";
  c.max_retries = 1;
  CHECK_THROWS_AS(http.complete("prompt", c, {}), RateLimited);
  c.endpoint = "127.0.0.1/v1";
  CHECK_THROWS_AS(http.complete("prompt", c, {}), ConfigError);

  server.stop();
  thread.join();
}

TEST_CASE("environment overrides") {
  setenv("SLICEBENCH_API_BASE", "http://localhost:9/v1", 1);
  setenv("SLICEBENCH_MODEL", "local-model", 1);
  ModelConfig c;
  c.name = "gpt-4o";
  const auto applied = apply_environment(c);
  CHECK(applied.endpoint == "http://localhost:9/v1");
  CHECK(applied.model_id == "local-model");
  unsetenv("SLICEBENCH_API_BASE");
  unsetenv("SLICEBENCH_MODEL");
}
