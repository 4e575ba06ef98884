#include "slicebench/llm/response_parser.hpp"

#include <algorithm>
#include <charconv>
#include <json.hpp>
#include <limits>

#include "slicebench/error.hpp"

namespace slicebench::llm {

namespace {

std::string_view strip_fences(std::string_view s) {
  const auto open = s.find("```");
  if (open == std::string_view::npos) return s;
  auto body = s.find('\n', open);
  if (body == std::string_view::npos) return s.substr(open + 3);
  ++body;
  const auto close = s.find("```", body);
  return s.substr(body, close == std::string_view::npos ? std::string_view::npos : close - body);
}

/// End (exclusive) of the balanced {...} starting at `begin`, or npos.
std::size_t object_end(std::string_view s, std::size_t begin) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = begin; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

bool parse_line(const nlohmann::json& item, long long& out) {
  if (item.is_number_integer()) {
    out = item.get<long long>();
    return true;
  }
  if (item.is_number_float()) {
    const double d = item.get<double>();
    if (!(d > -1e15 && d < 1e15)) return false;
    out = static_cast<long long>(d);
    return static_cast<double>(out) == d;
  }
  if (!item.is_string()) return false;
  std::string_view s = item.get_ref<const std::string&>();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

const char* to_string(ParseFailureKind kind) {
  switch (kind) {
    case ParseFailureKind::MalformedJson: return "MalformedJson";
    case ParseFailureKind::MissingOutputField: return "MissingOutputField";
    case ParseFailureKind::NonNumericLine: return "NonNumericLine";
    case ParseFailureKind::EmptyOutput: return "EmptyOutput";
  }
  return "?";
}

ParseFailureKind parse_failure_kind_from_string(const std::string& text) {
  for (auto k : {ParseFailureKind::MalformedJson, ParseFailureKind::MissingOutputField,
                 ParseFailureKind::NonNumericLine, ParseFailureKind::EmptyOutput}) {
    if (text == to_string(k)) return k;
  }
  throw Error("ParseError", "unknown parse failure kind '" + text + "'");
}

ParseResult parse_slice_response(std::string_view raw, int line_count) {
  const std::string_view text = strip_fences(raw);
  bool any_object = false;
  nlohmann::json found;
  bool has_output = false;
  for (std::size_t pos = text.find('{'); pos != std::string_view::npos && !has_output; pos = text.find('{', pos + 1)) {
    const auto end = object_end(text, pos);
    if (end == std::string_view::npos) continue;
    auto j = nlohmann::json::parse(text.substr(pos, end - pos), nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    any_object = true;
    if (j.contains("output")) {
      found = std::move(j["output"]);
      has_output = true;
    }
  }
  if (!any_object) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      return ParseFailure{ParseFailureKind::EmptyOutput, "response is empty"};
    }
    return ParseFailure{ParseFailureKind::MalformedJson, "no complete JSON object in response"};
  }
  if (!has_output) return ParseFailure{ParseFailureKind::MissingOutputField, "no object has an \"output\" member"};
  if (!found.is_array()) return ParseFailure{ParseFailureKind::NonNumericLine, "\"output\" is not an array"};
  if (found.empty()) return ParseFailure{ParseFailureKind::EmptyOutput, "\"output\" is empty"};

  ParsedSlice slice;
  for (const auto& item : found) {
    long long line = 0;
    if (!parse_line(item, line)) {
      return ParseFailure{ParseFailureKind::NonNumericLine, "not a line number: " + item.dump()};
    }
    if (line < 1 || line > std::numeric_limits<int>::max() || (line_count > 0 && line > line_count)) {
      slice.warnings.push_back("line " + std::to_string(line) + " is out of range and was dropped");
      continue;
    }
    slice.lines.push_back(static_cast<int>(line));
  }
  std::sort(slice.lines.begin(), slice.lines.end());
  slice.lines.erase(std::unique(slice.lines.begin(), slice.lines.end()), slice.lines.end());
  if (slice.lines.empty()) return ParseFailure{ParseFailureKind::EmptyOutput, "no line is within the program"};
  return slice;
}

}  // namespace slicebench::llm
