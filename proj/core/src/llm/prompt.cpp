#include "slicebench/llm/prompt.hpp"

#include <algorithm>

namespace slicebench::llm {

namespace {

const std::string kStaticTemplate =
    "You are an AI assistant specialized in performing backward static slicing for Java programs.\n"
    "You are provided with a Java code snippet with the line numbers and a Slicing Criterion.\n"
    "\n"
    "Important Notes:\n"
    "\n"
    "- Your task is to identify all lines in the program that may affect the value of the Slicing Criterion "
    "variable, following a backward slicing approach.\n"
    "\n"
    "- You need to first locate the line of the last instruction that affects the Slicing Criterion Variable in "
    "the code (That line is always in the output), then trace backward to find all relevant lines.\n"
    "\n"
    "Slicing Criterion Format:\n"
    "<<<criterion_format>>>\n"
    "\n"
    "Output Format:\n"
    "\n"
    "- An array of line numbers in plain JSON without any markdown in the following format:\n"
    "{\"output\": [\"line_number1\", \"line_number2\"]}\n"
    "\n"
    "<<<example>>>"
    "Task:\n"
    "\n"
    "Now, based on the provided Java program and Slicing Criterion, generate the output in the specified format.\n"
    "\n"
    "Slicing Criterion:\n"
    "<<<criterion>>>\n"
    "\n"
    "Program:\n"
    "<<<program>>>\n"
    "\n"
    "Output:\n";

const std::string kDynamicTemplate =
    "You are an AI assistant specialized in performing backward dynamic slicing for Java programs.\n"
    "You are provided with a Java code snippet, which includes line numbers, and a Slicing Criterion line number.\n"
    "\n"
    "Important Notes:\n"
    "\n"
    "- The Slicing Criterion line number corresponds to the return statement in the main function.\n"
    "\n"
    "- Your task is to start with the Slicing Criterion line number itself in the output and then trace backward "
    "through the code to identify all relevant lines that directly or indirectly influence the value at the "
    "Slicing Criterion.\n"
    "\n"
    "Output Format:\n"
    "\n"
    "- An array of line numbers in plain JSON without any markdown in the following format:\n"
    "{\"output\": [\"line_number1\", \"line_number2\"]}\n"
    "\n"
    "<<<example>>>"
    "Task:\n"
    "\n"
    "Now, based on the provided Java program and Slicing Criterion, generate the output in the specified format.\n"
    "\n"
    "Slicing Criterion:\n"
    "<<<criterion>>>\n"
    "\n"
    "Program:\n"
    "<<<program>>>\n"
    "\n"
    "Output:\n";

const std::string kCriterionFormat =
    "- The Slicing Criterion is written as variable@line, for example count@7, which asks for the lines that "
    "affect the value of count at line 7.";

const std::string kReferenceProgram =
    "public class Example {\n"
    "    public static int main(String[] args) {\n"
    "        int n = 4;\n"
    "        int sum = 0;\n"
    "        int product = 1;\n"
    "        for (int i = 1; i <= n; i++) {\n"
    "            sum += i;\n"
    "            product *= i;\n"
    "        }\n"
    "        return sum;\n"
    "    }\n"
    "}\n";

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::ZeroShot: return "zero_shot";
    case Strategy::OneShot: return "one_shot";
    case Strategy::OneShotCot: return "one_shot_cot";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& text) {
  if (text == "zero_shot") return Strategy::ZeroShot;
  if (text == "one_shot") return Strategy::OneShot;
  if (text == "one_shot_cot") return Strategy::OneShotCot;
  throw Error("ConfigError", "unknown strategy '" + text + "'");
}

std::string number_lines(const frontend::SourceProgram& program) {
  std::string out;
  for (int i = 1; i <= program.line_count(); ++i) {
    if (i > 1) out += '\n';
    out += std::to_string(i);
    out += ": ";
    out += program.line(i);
  }
  return out;
}

std::string render_output(const std::vector<int>& lines) {
  std::string out = "{\"output\": [";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += ", ";
    out += '"' + std::to_string(lines[i]) + '"';
  }
  return out + "]}";
}

const std::string& prompt_template(slicing::Mode mode) {
  return mode == slicing::Mode::Static ? kStaticTemplate : kDynamicTemplate;
}

const std::string& criterion_format_stanza() { return kCriterionFormat; }

std::string substitute(const std::string& tmpl, const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  std::size_t pos = 0;
  for (;;) {
    const auto open = tmpl.find("<<<", pos);
    if (open == std::string::npos) break;
    const auto close = tmpl.find(">>>", open + 3);
    if (close == std::string::npos) throw TemplateError("unterminated placeholder in template");
    const std::string name = tmpl.substr(open + 3, close - open - 3);
    auto it = std::find_if(values.begin(), values.end(), [&](const auto& kv) { return kv.first == name; });
    if (it == values.end()) throw TemplateError("no value for placeholder '" + name + "'");
    out.append(tmpl, pos, open - pos);
    out += it->second;
    pos = close + 3;
  }
  out.append(tmpl, pos, std::string::npos);
  return out;
}

std::string render_example(const ShotExample& example, bool with_reasoning) {
  std::string out = "Example:\n\nProgram:\n" + example.code + "\n\nSlicing Criterion:\n" + example.criterion + "\n\n";
  if (with_reasoning) out += "Reasoning:\n" + example.reasoning + "\n\n";
  out += "Output:\n" + render_output(example.output) + "\n\n";
  return out;
}

const ShotExample& default_example(slicing::Mode mode) {
  static const ShotExample kStatic = [] {
    ShotExample e;
    e.code = number_lines(frontend::SourceProgram("example", kReferenceProgram));
    e.criterion = "sum@10";
    e.reasoning =
        "1. The criterion asks for the value of sum at line 10, so line 10 is in the output.\n"
        "2. sum is updated at line 7 inside the loop and initialized at line 4.\n"
        "3. Line 7 runs only while the loop condition at line 6 holds, so line 6 is included. "
        "The condition reads n, so line 3 is included.\n"
        "4. product at lines 5 and 8 never flows into sum, so those lines are left out.\n"
        "5. The enclosing class and method declarations at lines 1 and 2 are kept.";
    e.output = {1, 2, 3, 4, 6, 7, 10};
    return e;
  }();
  static const ShotExample kDynamic = [] {
    ShotExample e;
    e.code = kStatic.code;
    e.criterion = "10";
    e.reasoning =
        "1. Line 10 is the return statement of main, so it starts the output.\n"
        "2. The returned sum was last written at line 7 in the final loop iteration, and before that at line 4.\n"
        "3. Each execution of line 7 was guarded by the loop condition at line 6, which reads n from line 3.\n"
        "4. product at lines 5 and 8 was executed but never influenced sum, so those lines are left out.\n"
        "5. The enclosing class and method declarations at lines 1 and 2 are kept.";
    e.output = {1, 2, 3, 4, 6, 7, 10};
    return e;
  }();
  return mode == slicing::Mode::Static ? kStatic : kDynamic;
}

std::string build_prompt(const PromptSpec& spec) {
  if (!spec.program) throw TemplateError("prompt has no program");
  if (spec.program->text().find(kTemplateDelimiter) != std::string::npos) {
    throw TemplateError("program " + spec.program->id() + " contains the template delimiter '<<<'");
  }
  if (spec.criterion.mode != spec.mode) throw TemplateError("criterion mode does not match prompt mode");
  std::string example;
  if (spec.strategy == Strategy::ZeroShot) {
    if (spec.example) throw TemplateError("zero-shot prompts carry no example");
  } else {
    const ShotExample& ex = spec.example ? *spec.example : default_example(spec.mode);
    if (spec.strategy == Strategy::OneShotCot && ex.reasoning.empty()) {
      throw TemplateError("one-shot CoT example has no reasoning");
    }
    example = render_example(ex, spec.strategy == Strategy::OneShotCot);
  }
  std::vector<std::pair<std::string, std::string>> values = {
      {"example", example},
      {"criterion", slicing::to_string(spec.criterion)},
      {"program", number_lines(*spec.program)},
  };
  if (spec.mode == slicing::Mode::Static) values.emplace_back("criterion_format", kCriterionFormat);
  return substitute(prompt_template(spec.mode), values);
}

}  // namespace slicebench::llm
