#include "slicebench/harness/ground_truth.hpp"

#include <chrono>
#include <fstream>
#include <json.hpp>
#include <mutex>

#include "slicebench/slicing/dynamic_slicer.hpp"
#include "slicebench/slicing/static_slicer.hpp"
#include "slicebench/util/hash.hpp"
#include "slicebench/util/parallel.hpp"

namespace slicebench::harness {

namespace {

constexpr const char* kOracleVersion = "oracle-v1";

std::optional<GroundTruth> read_cache(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  GroundTruth gt;
  gt.lines = j.value("lines", std::vector<int>{});
  gt.error_kind = j.value("error_kind", "");
  gt.error = j.value("error", "");
  gt.from_cache = true;
  return gt;
}

void write_cache(const std::filesystem::path& file, const GroundTruth& gt) {
  std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp);
    out << nlohmann::json{{"lines", gt.lines}, {"error_kind", gt.error_kind}, {"error", gt.error}}.dump() << '\n';
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace

GroundTruth compute_ground_truth(const ProgramEntry& program, const SliceTask& task, const GroundTruthOptions& options) {
  GroundTruth gt;
  try {
    if (task.criterion.mode == slicing::Mode::Static) {
      slicing::StaticSliceOptions so{options.structural, options.include_imports};
      gt.lines = slicing::static_backward_slice(*program.ast, *program.pdg, task.criterion, so).lines;
    } else {
      const auto trace = slicing::execute(*program.ast, *program.pdg, options.execution);
      gt.lines = slicing::dynamic_backward_slice(*program.ast, trace, task.criterion.line, options.structural).lines;
    }
  } catch (const Error& e) {
    gt.lines.clear();
    gt.error_kind = e.kind();
    gt.error = e.what();
  }
  return gt;
}

std::string ground_truth_key(const ProgramEntry& program, const SliceTask& task, const GroundTruthOptions& options) {
  std::string material = kOracleVersion;
  material += '\n' + util::sha256_hex(program.source().text());
  material += '\n' + std::string(slicing::to_string(task.criterion.mode)) + '\n' + slicing::to_string(task.criterion);
  material += options.structural == slicing::StructuralLines::Include ? "\nstructural" : "\nbare";
  material += options.include_imports ? "\nimports" : "\nno-imports";
  material += "\n" + std::to_string(options.execution.step_budget) + "/" + std::to_string(options.execution.max_call_depth);
  return util::sha256_hex(material);
}

std::map<std::string, GroundTruth> gen_ground_truth(const Dataset& dataset, const GroundTruthOptions& options,
                                                    GroundTruthStats* stats) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<GroundTruth> results(dataset.tasks.size());
  std::mutex stats_mutex;
  GroundTruthStats local;
  util::parallel_for(dataset.tasks.size(), options.workers ? options.workers : util::default_workers(), [&](std::size_t i) {
    const auto& task = dataset.tasks[i];
    const auto& program = dataset.program(task.program_id);
    std::filesystem::path file;
    if (!options.cache_dir.empty()) {
      file = options.cache_dir / (ground_truth_key(program, task, options) + ".json");
      if (auto cached = read_cache(file)) {
        results[i] = std::move(*cached);
        std::lock_guard lock(stats_mutex);
        ++local.cache_hits;
        return;
      }
    }
    results[i] = compute_ground_truth(program, task, options);
    if (!file.empty()) write_cache(file, results[i]);
    std::lock_guard lock(stats_mutex);
    ++local.computed;
  });
  std::map<std::string, GroundTruth> out;
  for (std::size_t i = 0; i < results.size(); ++i) out[dataset.tasks[i].task_id] = std::move(results[i]);
  local.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (stats) *stats = local;
  return out;
}

}  // namespace slicebench::harness
