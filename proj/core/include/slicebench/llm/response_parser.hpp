#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace slicebench::llm {

enum class ParseFailureKind { MalformedJson, MissingOutputField, NonNumericLine, EmptyOutput };

const char* to_string(ParseFailureKind kind);
ParseFailureKind parse_failure_kind_from_string(const std::string& text);

struct ParseFailure {
  ParseFailureKind kind = ParseFailureKind::MalformedJson;
  std::string detail;
};

struct ParsedSlice {
  std::vector<int> lines;             // sorted, unique, within [1, line_count]
  std::vector<std::string> warnings;  // e.g. dropped out-of-range lines
};

using ParseResult = std::variant<ParsedSlice, ParseFailure>;

/// Total: never throws. Strips markdown fences, takes the first JSON object
/// with an "output" member and converts its entries to line numbers.
/// `line_count` <= 0 disables the range check.
ParseResult parse_slice_response(std::string_view raw, int line_count);

}  // namespace slicebench::llm
