#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slicebench/error.hpp"
#include "slicebench/frontend/source_program.hpp"
#include "slicebench/slicing/slice.hpp"

namespace slicebench::llm {

enum class Strategy { ZeroShot, OneShot, OneShotCot };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& text);

/// A worked example shown to the model. `code` is already line-numbered.
struct ShotExample {
  std::string code;
  std::string criterion;
  std::string reasoning;  // only rendered for one-shot CoT
  std::vector<int> output;
};

struct PromptSpec {
  slicing::Mode mode = slicing::Mode::Static;
  Strategy strategy = Strategy::ZeroShot;
  const frontend::SourceProgram* program = nullptr;
  slicing::SlicingCriterion criterion;
  std::optional<ShotExample> example;
};

class TemplateError : public Error {
 public:
  explicit TemplateError(const std::string& message) : Error("TemplateError", message) {}
};

/// Placeholder syntax inside templates: <<<name>>>.
inline constexpr const char* kTemplateDelimiter = "<<<";

/// "1: first line\n2: second line" (no trailing newline).
std::string number_lines(const frontend::SourceProgram& program);

/// {"output": ["3", "5"]}
std::string render_output(const std::vector<int>& lines);

const std::string& prompt_template(slicing::Mode mode);

/// Text that replaces the criterion-format placeholder of the static template.
const std::string& criterion_format_stanza();

/// Fills <<<name>>> placeholders from `values` in one pass; unknown names throw.
std::string substitute(const std::string& tmpl, const std::vector<std::pair<std::string, std::string>>& values);

/// Example block (ending in a blank line) or "" for zero-shot.
std::string render_example(const ShotExample& example, bool with_reasoning);

/// The bundled example for `mode` over the 12-line reference program.
const ShotExample& default_example(slicing::Mode mode);

/// Builds the full prompt. One-shot strategies fall back to default_example
/// when `example` is unset; zero-shot rejects an example.
std::string build_prompt(const PromptSpec& spec);

}  // namespace slicebench::llm
