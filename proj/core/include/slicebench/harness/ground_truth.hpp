#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slicebench/harness/dataset.hpp"
#include "slicebench/slicing/interpreter.hpp"

namespace slicebench::harness {

struct GroundTruth {
  std::vector<int> lines;  // empty when `error_kind` is set
  std::string error_kind;
  std::string error;
  bool from_cache = false;

  bool ok() const { return error_kind.empty(); }
};

struct GroundTruthOptions {
  slicing::StructuralLines structural = slicing::StructuralLines::Include;
  bool include_imports = false;
  slicing::ExecuteOptions execution;
  std::filesystem::path cache_dir;  // empty disables caching
  std::size_t workers = 0;          // 0 = hardware concurrency
};

struct GroundTruthStats {
  std::size_t computed = 0;
  std::size_t cache_hits = 0;
  double elapsed_ms = 0.0;
};

/// Oracle slice of one task.
GroundTruth compute_ground_truth(const ProgramEntry& program, const SliceTask& task, const GroundTruthOptions& options);

/// Cache key: SHA-256 over program text, mode, criterion and oracle options.
std::string ground_truth_key(const ProgramEntry& program, const SliceTask& task, const GroundTruthOptions& options);

/// Oracle slices for every task, keyed by task id. Errors are recorded per
/// task and never stop the batch.
std::map<std::string, GroundTruth> gen_ground_truth(const Dataset& dataset, const GroundTruthOptions& options,
                                                    GroundTruthStats* stats = nullptr);

}  // namespace slicebench::harness
