#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "slicebench/flow/pdg.hpp"
#include "slicebench/frontend/parser.hpp"
#include "slicebench/harness/improvement.hpp"
#include "slicebench/harness/report.hpp"
#include "slicebench/harness/server.hpp"
#include "slicebench/slicing/dynamic_slicer.hpp"
#include "slicebench/slicing/interpreter.hpp"
#include "slicebench/slicing/static_slicer.hpp"

namespace sb = slicebench;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sb::Error("IoError", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw sb::Error("IoError", "cannot write " + path);
}

sb::harness::GroundTruthOptions truth_options(const sb::harness::ExperimentConfig& c) {
  sb::harness::GroundTruthOptions o;
  o.structural = c.structural;
  o.cache_dir = c.cache_dir;
  o.workers = static_cast<std::size_t>(c.concurrency);
  return o;
}

json lines_json(const std::vector<int>& v) { return json(v); }

sb::harness::Dataset load_dataset(const std::filesystem::path& dir) {
  auto ds = sb::harness::ingest_dataset(dir);
  for (const auto& m : ds.skipped) std::cerr << "skipped " << m.program_id << ": " << m.kind << ": " << m.message << "\n";
  return ds;
}

std::map<std::string, sb::harness::GroundTruth> truth_for(const sb::harness::ExperimentConfig& c,
                                                          const sb::harness::Dataset& ds) {
  sb::harness::GroundTruthStats stats;
  auto truth = sb::harness::gen_ground_truth(ds, truth_options(c), &stats);
  std::cerr << "ground truth: " << stats.computed << " computed, " << stats.cache_hits << " cached, "
            << sb::metrics::format_percent(stats.elapsed_ms) << " ms\n";
  for (const auto& [id, gt] : truth) {
    if (!gt.ok()) std::cerr << "ground truth error " << id << ": " << gt.error_kind << ": " << gt.error << "\n";
  }
  return truth;
}

sb::harness::TriageService* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Program slicing workbench: oracle slices, LLM evaluation and failure triage"};
  app.require_subcommand(1);

  std::string config_path;
  std::string dataset_dir;
  std::string structural = "include";

  auto* ingest = app.add_subcommand("ingest", "Parse a corpus and list its tasks");
  ingest->add_option("--dataset", dataset_dir, "Corpus directory")->required();

  std::string out_path;
  auto* gt = app.add_subcommand("ground-truth", "Compute oracle slices for every task");
  gt->add_option("--config", config_path, "Experiment config");
  gt->add_option("--dataset", dataset_dir, "Corpus directory (without --config)");
  gt->add_option("--structural-lines", structural, "include or exclude")->check(CLI::IsMember({"include", "exclude"}));
  gt->add_option("--out", out_path, "Write JSON here instead of stdout");

  std::size_t stop_after = 0;
  auto* run = app.add_subcommand("run", "Run the configured experiment (resumes by record key)");
  run->add_option("--config", config_path, "Experiment config")->required();
  run->add_option("--stop-after", stop_after, "Stop after this many new records");

  std::string results_path, acc_d, grouping = "task";
  bool as_json = false;
  auto* score = app.add_subcommand("score", "Re-score persisted results and print aggregate tables");
  score->add_option("--config", config_path, "Experiment config")->required();
  score->add_option("--results", results_path, "Results JSONL (default: config output)");
  score->add_option("--acc-d", acc_d, "lines or edges")->check(CLI::IsMember({"lines", "edges"}));
  score->add_option("--grouping", grouping, "task or program")->check(CLI::IsMember({"task", "program"}));
  score->add_flag("--json", as_json, "Emit JSON");

  std::string strategy, baseline_path, bars_path;
  int max_iterations = 0;
  auto* improve = app.add_subcommand("improve", "Run an improvement strategy against the vanilla baseline");
  improve->add_option("--config", config_path, "Experiment config");
  improve->add_option("--strategy", strategy, "crafted or iterative")->check(CLI::IsMember({"crafted", "iterative"}));
  improve->add_option("--baseline", baseline_path, "Vanilla results JSONL (default: config output)");
  improve->add_option("--max-iterations", max_iterations, "Feedback rounds per labeled task");
  improve->add_option("--bars", bars_path, "Render a reference bar dataset and exit");

  std::string host = "127.0.0.1", static_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the triage API");
  serve->add_option("--config", config_path, "Experiment config")->required();
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks one)");
  serve->add_option("--static-dir", static_dir, "Triage UI assets");

  std::string file, variable, dump_pdg, dump_trace;
  int line = 0;
  auto* sstatic = app.add_subcommand("slice-static", "Backward static slice of one Java file");
  sstatic->add_option("file", file, "Java source")->required();
  sstatic->add_option("--variable", variable, "Criterion variable")->required();
  sstatic->add_option("--line", line, "Criterion line")->required();
  sstatic->add_option("--structural-lines", structural, "include or exclude")->check(CLI::IsMember({"include", "exclude"}));
  sstatic->add_option("--dump-pdg", dump_pdg, "Write the PDG in DOT format");

  auto* sdynamic = app.add_subcommand("slice-dynamic", "Backward dynamic slice of one execution of main");
  sdynamic->add_option("file", file, "Java source")->required();
  sdynamic->add_option("--line", line, "Criterion line (default: the return in main)");
  sdynamic->add_option("--structural-lines", structural, "include or exclude")->check(CLI::IsMember({"include", "exclude"}));
  sdynamic->add_option("--dump-trace", dump_trace, "Write the execution trace as JSONL");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const auto ds = sb::harness::ingest_dataset(dataset_dir);
      json j;
      for (const auto& t : ds.tasks) {
        j["tasks"].push_back({{"task_id", t.task_id}, {"criterion", sb::slicing::to_string(t.criterion)}});
      }
      j["skipped"] = json::array();
      for (const auto& m : ds.skipped) j["skipped"].push_back({{"program", m.program_id}, {"kind", m.kind}, {"message", m.message}});
      std::cout << j.dump(2) << "\n";
      return ds.skipped.empty() ? 0 : 2;
    }

    if (*gt) {
      sb::harness::ExperimentConfig c;
      if (!config_path.empty()) c = sb::harness::load_config(config_path);
      else if (!dataset_dir.empty()) c.dataset = dataset_dir, c.cache_dir.clear();
      else throw sb::Error("Usage", "ground-truth needs --config or --dataset");
      if (gt->count("--structural-lines")) c.structural = sb::slicing::structural_lines_from_string(structural);
      const auto ds = load_dataset(c.dataset);
      const auto truth = truth_for(c, ds);
      json j = json::object();
      for (const auto& [id, g] : truth) {
        j[id] = g.ok() ? json{{"lines", g.lines}} : json{{"error", g.error_kind}, {"message", g.error}};
      }
      if (out_path.empty()) std::cout << j.dump(2) << "\n";
      else write_file(out_path, j.dump(2) + "\n");
      return 0;
    }

    if (*run) {
      const auto c = sb::harness::load_config(config_path);
      const auto ds = load_dataset(c.dataset);
      const auto truth = truth_for(c, ds);
      sb::harness::RunOptions opts;
      if (stop_after > 0) opts.stop_after = stop_after;
      const auto s = sb::harness::run_experiment(c, ds, truth, opts);
      std::cout << "records: " << s.total << " total, " << s.executed << " executed, " << s.resumed << " resumed, "
                << s.errors << " errors\n";
      return 0;
    }

    if (*score) {
      auto c = sb::harness::load_config(config_path);
      if (!acc_d.empty()) c.acc_d = sb::metrics::acc_d_mode_from_string(acc_d);
      auto records = sb::harness::load_records(results_path.empty() ? c.output : std::filesystem::path(results_path));
      const auto ds = load_dataset(c.dataset);
      sb::harness::rescore(records, ds, c.acc_d);
      const auto rows = sb::harness::aggregate_records(
          records, grouping == "program" ? sb::metrics::Grouping::PerProgram : sb::metrics::Grouping::PerTask);
      if (as_json) {
        json j{{"aggregates", sb::harness::rows_to_json(rows)}};
        if (auto t = sb::harness::static_vs_dynamic(rows, sb::harness::kVanilla)) {
          j["static_vs_dynamic"] = {{"u", t->u_statistic}, {"p_value", t->p_value}};
        }
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << sb::harness::render_tables(rows);
        if (auto t = sb::harness::static_vs_dynamic(rows, sb::harness::kVanilla)) {
          std::cout << "Mann-Whitney static vs dynamic Acc-D: U=" << t->u_statistic << " p=" << t->p_value << "\n";
        }
      }
      return 0;
    }

    if (*improve) {
      if (!bars_path.empty()) {
        std::cout << sb::improve::render_improvement_bars(sb::improve::load_improvement_bars(bars_path));
        return 0;
      }
      if (config_path.empty() || strategy.empty()) throw sb::Error("Usage", "improve needs --config and --strategy");
      auto c = sb::harness::load_config(config_path);
      if (max_iterations > 0) c.max_iterations = max_iterations;
      const auto baseline = sb::harness::load_records(baseline_path.empty() ? c.output : std::filesystem::path(baseline_path));
      const auto ds = load_dataset(c.dataset);
      const auto truth = truth_for(c, ds);
      sb::harness::ImprovementResult r;
      if (strategy == "crafted") {
        r = sb::harness::run_crafted(c, ds, truth, baseline, sb::improve::default_crafted_example());
      } else {
        sb::taxonomy::LabelStore labels(c.labels);
        r = sb::harness::run_iterative(c, ds, truth, baseline, labels);
        std::cout << r.iterations.size() << " re-prompts\n";
      }
      for (const auto& row : r.rows) {
        std::cout << row.model << " " << row.mode << " " << row.strategy << ": vanilla "
                  << sb::metrics::format_percent(row.vanilla) << " -> " << sb::metrics::format_percent(row.improved)
                  << " (" << (row.delta >= 0 ? "+" : "") << sb::metrics::format_percent(row.delta) << ")\n";
      }
      return 0;
    }

    if (*serve) {
      sb::harness::ServerOptions opts;
      opts.config = sb::harness::load_config(config_path);
      opts.static_dir = static_dir;
      auto ds = load_dataset(opts.config.dataset);
      auto truth = truth_for(opts.config, ds);
      sb::harness::TriageService service(opts, std::move(ds), std::move(truth));
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const bool ok = service.listen(host, port, [&](int bound) {
        std::cout << "listening on http://" << host << ":" << bound << std::endl;
      });
      g_service = nullptr;
      return ok ? 0 : 1;
    }

    const auto structural_mode = sb::slicing::structural_lines_from_string(structural);
    const auto ast = sb::frontend::parse_program(read_file(file), file);
    const auto pdg = sb::flow::build_pdg(ast);

    if (*sstatic) {
      if (!dump_pdg.empty()) write_file(dump_pdg, sb::flow::pdg_to_dot(ast, pdg));
      sb::slicing::SlicingCriterion crit{sb::slicing::Mode::Static, variable, line};
      const auto slice = sb::slicing::static_backward_slice(ast, pdg, crit, {structural_mode, false});
      std::cout << json{{"criterion", sb::slicing::to_string(crit)}, {"lines", lines_json(slice.lines)}}.dump() << "\n";
      return 0;
    }

    if (*sdynamic) {
      const auto trace = sb::slicing::execute(ast, pdg);
      if (!dump_trace.empty()) write_file(dump_trace, sb::slicing::trace_to_jsonl(trace));
      if (line == 0) {
        const auto ret = sb::harness::main_return_line(ast);
        if (!ret) throw sb::Error("CriterionError", "main has no return statement; pass --line");
        line = *ret;
      }
      const auto slice = sb::slicing::dynamic_backward_slice(ast, trace, line, structural_mode);
      std::cout << json{{"criterion", line}, {"lines", lines_json(slice.lines)}, {"result", trace.return_value}}.dump()
                << "\n";
      return 0;
    }
  } catch (const sb::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
