#include "slicebench/harness/report.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace slicebench::harness {

std::vector<std::vector<metrics::TaskScore>> runs_of(const std::vector<ExperimentRecord>& records,
                                                     const std::string& experiment, const std::string& model,
                                                     const std::string& strategy, const std::string& mode) {
  std::map<int, std::map<std::string, metrics::TaskScore>> by_run;
  for (const auto& r : records) {
    if (r.experiment != experiment || r.model != model || r.strategy != strategy) continue;
    if (!mode.empty() && r.mode != mode) continue;
    by_run[r.run][r.task_id] = r.score;  // a later duplicate replaces an earlier one
  }
  std::vector<std::vector<metrics::TaskScore>> out;
  for (auto& [run, scores] : by_run) {
    auto& v = out.emplace_back();
    for (auto& [id, s] : scores) v.push_back(s);
  }
  return out;
}

std::vector<ReportRow> aggregate_records(const std::vector<ExperimentRecord>& records, metrics::Grouping grouping) {
  std::set<std::tuple<std::string, std::string, std::string, std::string>> cells;
  for (const auto& r : records) cells.emplace(r.experiment, r.model, r.mode, r.strategy);
  std::vector<ReportRow> rows;
  for (const auto& [experiment, model, mode, strategy] : cells) {
    ReportRow row;
    row.experiment = experiment;
    row.aggregate = metrics::aggregate(runs_of(records, experiment, model, strategy, mode), grouping);
    row.aggregate.model = model;
    row.aggregate.mode = mode;
    row.aggregate.strategy = strategy;
    rows.push_back(std::move(row));
  }
  return rows;
}

void rescore(std::vector<ExperimentRecord>& records, const Dataset& dataset, metrics::AccDMode mode) {
  for (auto& r : records) {
    if (!dataset.programs.count(r.program_id)) throw Error("UnknownProgram", "results mention unknown program " + r.program_id);
    score_record(r, dataset.program(r.program_id), mode);
  }
}

std::optional<metrics::StatTestResult> static_vs_dynamic(const std::vector<ReportRow>& rows,
                                                         const std::string& experiment) {
  std::vector<double> s, d;
  for (const auto& row : rows) {
    if (row.experiment != experiment) continue;
    if (row.aggregate.mode == "static") s.push_back(row.aggregate.acc_d);
    if (row.aggregate.mode == "dynamic") d.push_back(row.aggregate.acc_d);
  }
  if (s.empty() || d.empty()) return std::nullopt;
  return metrics::mann_whitney_u(s, d);
}

std::string render_tables(const std::vector<ReportRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::vector<const ReportRow*>> tables;
  for (const auto& row : rows) tables[{row.experiment, row.aggregate.mode}].push_back(&row);
  std::ostringstream os;
  for (const auto& [key, members] : tables) {
    std::vector<std::string> strategies, models;
    for (const auto* r : members) {
      if (std::find(strategies.begin(), strategies.end(), r->aggregate.strategy) == strategies.end())
        strategies.push_back(r->aggregate.strategy);
      if (std::find(models.begin(), models.end(), r->aggregate.model) == models.end())
        models.push_back(r->aggregate.model);
    }
    os << key.first << " / " << key.second << "\n";
    os << std::left << std::setw(18) << "model";
    for (const auto& s : strategies) os << " | " << std::setw(28) << (s + " Acc-D / Acc-EM");
    os << "\n";
    for (const auto& m : models) {
      os << std::setw(18) << m;
      for (const auto& s : strategies) {
        std::string cell = "-";
        for (const auto* r : members) {
          if (r->aggregate.model == m && r->aggregate.strategy == s) {
            cell = metrics::format_percent(r->aggregate.acc_d) + " / " + metrics::format_percent(r->aggregate.acc_em);
          }
        }
        os << " | " << std::setw(28) << cell;
      }
      os << "\n";
    }
    os << "\n";
  }
  return os.str();
}

nlohmann::json rows_to_json(const std::vector<ReportRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& row : rows) {
    const auto& a = row.aggregate;
    out.push_back({{"experiment", row.experiment},
                   {"model", a.model},
                   {"mode", a.mode},
                   {"strategy", a.strategy},
                   {"runs", a.runs},
                   {"acc_d", a.acc_d},
                   {"acc_em", a.acc_em},
                   {"acc_d_text", metrics::format_percent(a.acc_d)},
                   {"acc_em_text", metrics::format_percent(a.acc_em)},
                   {"per_run_acc_d", a.per_run_acc_d},
                   {"per_run_acc_em", a.per_run_acc_em}});
  }
  return out;
}

std::vector<ExperimentRecord> select_failures(const std::vector<ExperimentRecord>& records,
                                              const std::string& experiment, const std::string& model,
                                              const std::string& strategy, int run) {
  std::map<std::string, ExperimentRecord> latest;
  for (const auto& r : records) {
    if (r.experiment == experiment && r.model == model && r.strategy == strategy && r.run == run) latest[r.task_id] = r;
  }
  std::vector<ExperimentRecord> out;
  for (auto& [id, r] : latest) {
    if (metrics::is_failure(r.score)) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace slicebench::harness
