#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "slicebench/flow/pdg.hpp"
#include "slicebench/frontend/parser.hpp"
#include "slicebench/llm/response_parser.hpp"
#include "slicebench/slicing/dynamic_slicer.hpp"
#include "slicebench/slicing/interpreter.hpp"
#include "slicebench/slicing/static_slicer.hpp"

namespace {

namespace fs = std::filesystem;
using namespace slicebench;

const fs::path kCorpus = fs::path(SLICEBENCH_SOURCE_DIR) / "corpus";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string program_id(std::int64_t n) {
  return (n < 10 ? "p0" : "p") + std::to_string(n);
}

std::string source_of(std::int64_t n) {
  return read_file(kCorpus / "programs" / (program_id(n) + ".java"));
}

void BM_Parse(benchmark::State& state) {
  const auto text = source_of(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(frontend::parse_program(text, "p"));
}

void BM_BuildPdg(benchmark::State& state) {
  const auto ast = frontend::parse_program(source_of(state.range(0)), "p");
  for (auto _ : state) benchmark::DoNotOptimize(flow::build_pdg(ast));
}

void BM_StaticSlice(benchmark::State& state) {
  const auto id = program_id(state.range(0));
  const auto ast = frontend::parse_program(source_of(state.range(0)), id);
  const auto pdg = flow::build_pdg(ast);
  const auto crit = nlohmann::json::parse(read_file(kCorpus / "criteria" / (id + ".json")))["static"];
  const slicing::SlicingCriterion criterion{slicing::Mode::Static, crit["variable"].get<std::string>(),
                                            crit["line"].get<int>()};
  for (auto _ : state) benchmark::DoNotOptimize(slicing::static_backward_slice(ast, pdg, criterion));
}

void BM_ExecuteAndDynamicSlice(benchmark::State& state) {
  const auto ast = frontend::parse_program(source_of(state.range(0)), "p");
  const auto pdg = flow::build_pdg(ast);
  int line = 0;
  for (const auto& st : ast.stmts) {
    if (st.kind == frontend::StmtKind::Return && ast.method(st.method).name == "main") line = st.line;
  }
  std::size_t instances = 0;
  for (auto _ : state) {
    const auto trace = slicing::execute(ast, pdg);
    instances = trace.entries.size();
    benchmark::DoNotOptimize(slicing::dynamic_backward_slice(ast, trace, line));
  }
  state.counters["instances"] = static_cast<double>(instances);
}

void BM_ParseResponse(benchmark::State& state) {
  std::string raw = "Here is the slice.\n```json\n{\"output\": [";
  for (int i = 1; i <= state.range(0); ++i) raw += (i > 1 ? ", \"" : "\"") + std::to_string(i) + "\"";
  raw += "]}\n```\n";
  for (auto _ : state) benchmark::DoNotOptimize(llm::parse_slice_response(raw, static_cast<int>(state.range(0))));
}

BENCHMARK(BM_Parse)->DenseRange(1, 20, 19);
BENCHMARK(BM_BuildPdg)->DenseRange(1, 20, 19);
BENCHMARK(BM_StaticSlice)->DenseRange(1, 20, 1);
BENCHMARK(BM_ExecuteAndDynamicSlice)->Arg(1)->Arg(4)->Arg(6)->Arg(10);
BENCHMARK(BM_ParseResponse)->Arg(10)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
