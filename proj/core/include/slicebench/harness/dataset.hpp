#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slicebench/flow/pdg.hpp"
#include "slicebench/slicing/slice.hpp"

namespace slicebench::harness {

struct ProgramEntry {
  std::string id;
  std::shared_ptr<const frontend::Ast> ast;
  std::shared_ptr<const flow::Pdg> pdg;

  const frontend::SourceProgram& source() const { return ast->source; }
};

/// One (program, criterion) pair; id is "<program>:static" or "<program>:dynamic".
struct SliceTask {
  std::string task_id;
  std::string program_id;
  slicing::SlicingCriterion criterion;
};

/// A program or criterion left out of the task list, and why.
struct ManifestEntry {
  std::string program_id;
  std::string kind;  // ParseError, MissingCriterion, CriterionMismatch, ...
  std::string message;
};

struct Dataset {
  std::filesystem::path dir;
  std::map<std::string, ProgramEntry> programs;
  std::vector<SliceTask> tasks;  // ordered by program id, static before dynamic
  std::vector<ManifestEntry> skipped;

  const SliceTask* find_task(const std::string& task_id) const;
  const ProgramEntry& program(const std::string& id) const;
};

std::string task_id_for(const std::string& program_id, slicing::Mode mode);

/// Criterion sidecar: {"static": {"variable": v, "line": n}, "dynamic": {"line": m}}.
struct CriterionSidecar {
  std::optional<slicing::SlicingCriterion> static_criterion;
  std::optional<slicing::SlicingCriterion> dynamic_criterion;
};

CriterionSidecar parse_sidecar(const std::string& json_text);

/// Line of the last `return <expr>;` in main, if any.
std::optional<int> main_return_line(const frontend::Ast& ast);

/// Reads programs/<id>.java and criteria/<id>.json under `dir`. Programs the
/// subset parser rejects and bad criteria are listed in `skipped`; the rest
/// proceed. A dynamic task exists when main returns a value; its line comes
/// from the sidecar or defaults to main's last return.
Dataset ingest_dataset(const std::filesystem::path& dir);

/// Hand-verified slices from expected/<id>.json ({"static": [...], "dynamic": [...]}).
struct ExpectedSlices {
  std::optional<std::vector<int>> static_lines;
  std::optional<std::vector<int>> dynamic_lines;
};

std::optional<ExpectedSlices> load_expected(const std::filesystem::path& dir, const std::string& program_id);

}  // namespace slicebench::harness
