#include "slicebench/harness/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "slicebench/frontend/parser.hpp"
#include "slicebench/slicing/static_slicer.hpp"

namespace slicebench::harness {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const SliceTask* Dataset::find_task(const std::string& task_id) const {
  for (const auto& t : tasks) {
    if (t.task_id == task_id) return &t;
  }
  return nullptr;
}

const ProgramEntry& Dataset::program(const std::string& id) const {
  auto it = programs.find(id);
  if (it == programs.end()) throw Error("UnknownProgram", "unknown program '" + id + "'");
  return it->second;
}

std::string task_id_for(const std::string& program_id, slicing::Mode mode) {
  return program_id + ":" + slicing::to_string(mode);
}

CriterionSidecar parse_sidecar(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("MissingCriterion", "criterion sidecar is not a JSON object");
  CriterionSidecar s;
  if (j.contains("static")) {
    const auto& c = j["static"];
    if (!c.contains("variable") || !c.contains("line")) {
      throw Error("MissingCriterion", "static criterion needs \"variable\" and \"line\"");
    }
    s.static_criterion = slicing::SlicingCriterion{slicing::Mode::Static, c["variable"].get<std::string>(),
                                                   c["line"].get<int>()};
  }
  if (j.contains("dynamic")) {
    const auto& c = j["dynamic"];
    if (!c.contains("line")) throw Error("MissingCriterion", "dynamic criterion needs \"line\"");
    s.dynamic_criterion = slicing::SlicingCriterion{slicing::Mode::Dynamic, "", c["line"].get<int>()};
  }
  return s;
}

std::optional<int> main_return_line(const frontend::Ast& ast) {
  const auto main = ast.main_method();
  if (!main) return std::nullopt;
  std::optional<int> line;
  for (const auto& s : ast.stmts) {
    if (s.method == *main && s.kind == frontend::StmtKind::Return && s.expr) {
      if (!line || s.line > *line) line = s.line;
    }
  }
  return line;
}

Dataset ingest_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.dir = dir;
  const auto programs_dir = dir / "programs";
  if (!std::filesystem::is_directory(programs_dir)) {
    throw Error("IoError", "no programs/ directory under " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(programs_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".java") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  for (const auto& file : files) {
    const std::string id = file.stem().string();
    ProgramEntry entry;
    entry.id = id;
    try {
      auto ast = std::make_shared<frontend::Ast>(frontend::parse_program(read_file(file), id));
      entry.pdg = std::make_shared<flow::Pdg>(flow::build_pdg(*ast));
      entry.ast = std::move(ast);
    } catch (const Error& e) {
      ds.skipped.push_back({id, e.kind(), e.what()});
      continue;
    }

    CriterionSidecar sidecar;
    const auto crit_path = dir / "criteria" / (id + ".json");
    try {
      if (std::filesystem::exists(crit_path)) sidecar = parse_sidecar(read_file(crit_path));
    } catch (const Error& e) {
      ds.skipped.push_back({id, e.kind(), e.what()});
      continue;
    } catch (const std::exception& e) {
      ds.skipped.push_back({id, "MissingCriterion", e.what()});
      continue;
    }

    const auto& ast = *entry.ast;
    std::vector<SliceTask> tasks;
    if (sidecar.static_criterion) {
      try {
        slicing::static_seed(ast, *sidecar.static_criterion);
        tasks.push_back({task_id_for(id, slicing::Mode::Static), id, *sidecar.static_criterion});
      } catch (const Error& e) {
        ds.skipped.push_back({id, "CriterionMismatch", e.what()});
      }
    } else {
      ds.skipped.push_back({id, "MissingCriterion", "no static criterion"});
    }
    const auto ret = main_return_line(ast);
    if (sidecar.dynamic_criterion) {
      const int line = sidecar.dynamic_criterion->line;
      bool is_return = false;
      for (const auto& s : ast.stmts) {
        if (s.line == line && s.kind == frontend::StmtKind::Return && ast.main_method() && s.method == *ast.main_method()) {
          is_return = true;
        }
      }
      if (!is_return) {
        ds.skipped.push_back({id, "CriterionMismatch",
                              "dynamic criterion line " + std::to_string(line) + " is not a return statement in main"});
      } else {
        tasks.push_back({task_id_for(id, slicing::Mode::Dynamic), id, *sidecar.dynamic_criterion});
      }
    } else if (ret) {
      tasks.push_back({task_id_for(id, slicing::Mode::Dynamic), id,
                       slicing::SlicingCriterion{slicing::Mode::Dynamic, "", *ret}});
    }
    for (auto& t : tasks) ds.tasks.push_back(std::move(t));
    ds.programs.emplace(id, std::move(entry));
  }
  return ds;
}

std::optional<ExpectedSlices> load_expected(const std::filesystem::path& dir, const std::string& program_id) {
  const auto p = dir / "expected" / (program_id + ".json");
  if (!std::filesystem::exists(p)) return std::nullopt;
  const auto j = nlohmann::json::parse(read_file(p));
  ExpectedSlices e;
  if (j.contains("static")) e.static_lines = j["static"].get<std::vector<int>>();
  if (j.contains("dynamic")) e.dynamic_lines = j["dynamic"].get<std::vector<int>>();
  return e;
}

}  // namespace slicebench::harness
