#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slicebench/harness/experiment.hpp"

namespace slicebench::harness {

struct ReportRow {
  std::string experiment;
  metrics::ExperimentAggregate aggregate;
};

/// Scores of one (experiment, model, strategy, mode) cell, one vector per run
/// index, each ordered by task id.
std::vector<std::vector<metrics::TaskScore>> runs_of(const std::vector<ExperimentRecord>& records,
                                                     const std::string& experiment, const std::string& model,
                                                     const std::string& strategy, const std::string& mode);

/// One row per (experiment, model, mode, strategy), in that order.
std::vector<ReportRow> aggregate_records(const std::vector<ExperimentRecord>& records,
                                         metrics::Grouping grouping = metrics::Grouping::PerTask);

/// Recomputes parse results and scores from raw responses.
void rescore(std::vector<ExperimentRecord>& records, const Dataset& dataset, metrics::AccDMode mode);

/// Acc-D of static rows against dynamic rows of the same experiment; nullopt
/// when either side is empty.
std::optional<metrics::StatTestResult> static_vs_dynamic(const std::vector<ReportRow>& rows,
                                                         const std::string& experiment);

/// Text tables shaped like the per-mode result tables: one row per model,
/// Acc-D / Acc-EM columns per strategy.
std::string render_tables(const std::vector<ReportRow>& rows);

nlohmann::json rows_to_json(const std::vector<ReportRow>& rows);

/// Records of the given cell whose run `run` scored Acc-D below 100%.
std::vector<ExperimentRecord> select_failures(const std::vector<ExperimentRecord>& records,
                                              const std::string& experiment, const std::string& model,
                                              const std::string& strategy, int run = 1);

}  // namespace slicebench::harness
