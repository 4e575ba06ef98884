#include "slicebench/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace slicebench::metrics {

namespace {

std::vector<int> normalized(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::size_t intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.size();
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

AccDMode acc_d_mode_from_string(const std::string& text) {
  if (text == "lines") return AccDMode::Lines;
  if (text == "edges") return AccDMode::Edges;
  throw Error("ConfigError", "unknown Acc-D mode '" + text + "' (expected lines or edges)");
}

const char* to_string(AccDMode mode) { return mode == AccDMode::Lines ? "lines" : "edges"; }

bool exact_match(const std::vector<int>& pred, const std::vector<int>& truth) {
  return normalized(pred) == normalized(truth);
}

double dependence_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const auto t = normalized(truth);
  if (t.empty()) throw EmptyTruth("<unnamed>");
  return static_cast<double>(intersection_size(normalized(pred), t)) / static_cast<double>(t.size());
}

std::set<LineEdge> line_edges(const frontend::Ast& ast, const flow::Pdg& pdg) {
  std::set<LineEdge> out;
  for (const auto& e : pdg.edges) {
    const int from = ast.stmt(e.from).line;
    const int to = ast.stmt(e.to).line;
    if (from != to) out.emplace(from, to);
  }
  return out;
}

double dependence_accuracy_edges(const std::vector<int>& pred, const std::vector<int>& truth,
                                 const std::set<LineEdge>& edges) {
  const auto t = normalized(truth);
  if (t.empty()) throw EmptyTruth("<unnamed>");
  const auto p = normalized(pred);
  auto in = [](const std::vector<int>& s, int x) { return std::binary_search(s.begin(), s.end(), x); };
  std::size_t total = 0, hit = 0;
  for (const auto& [from, to] : edges) {
    if (!in(t, from) || !in(t, to)) continue;
    ++total;
    if (in(p, from) && in(p, to)) ++hit;
  }
  if (total == 0) return dependence_accuracy(p, t);
  return static_cast<double>(hit) / static_cast<double>(total);
}

TaskScore score_task(const std::string& task_id, const std::vector<int>& pred, const std::vector<int>& truth) {
  return score_task(task_id, pred, truth, AccDMode::Lines, nullptr);
}

TaskScore score_task(const std::string& task_id, const std::vector<int>& pred, const std::vector<int>& truth,
                     AccDMode mode, const std::set<LineEdge>* edges) {
  if (truth.empty()) throw EmptyTruth(task_id);
  TaskScore s;
  s.task_id = task_id;
  s.exact_match = exact_match(pred, truth);
  if (s.exact_match) {
    s.acc_d = 1.0;
  } else if (mode == AccDMode::Edges && edges) {
    s.acc_d = dependence_accuracy_edges(pred, truth, *edges);
  } else {
    s.acc_d = dependence_accuracy(pred, truth);
  }
  return s;
}

TaskScore parse_failure_score(const std::string& task_id) {
  TaskScore s;
  s.task_id = task_id;
  s.parse_failed = true;
  return s;
}

std::string program_of(const std::string& task_id) { return task_id.substr(0, task_id.find(':')); }

ExperimentAggregate aggregate(const std::vector<std::vector<TaskScore>>& runs, Grouping grouping) {
  if (runs.empty()) throw RunMismatch("no runs to aggregate");
  auto ids = [](const std::vector<TaskScore>& run) {
    std::vector<std::string> v;
    for (const auto& s : run) v.push_back(s.task_id);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto reference = ids(runs.front());
  if (std::adjacent_find(reference.begin(), reference.end()) != reference.end()) {
    throw RunMismatch("a run scores the same task twice");
  }
  ExperimentAggregate agg;
  agg.runs = static_cast<int>(runs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (ids(runs[r]) != reference) throw RunMismatch("run " + std::to_string(r + 1) + " covers a different task set");
    std::vector<double> d, em;
    if (grouping == Grouping::PerTask) {
      for (const auto& s : runs[r]) {
        d.push_back(s.acc_d);
        em.push_back(s.exact_match ? 1.0 : 0.0);
      }
    } else {
      std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_program;
      for (const auto& s : runs[r]) {
        auto& [pd, pem] = by_program[program_of(s.task_id)];
        pd.push_back(s.acc_d);
        pem.push_back(s.exact_match ? 1.0 : 0.0);
      }
      for (const auto& [_, v] : by_program) {
        d.push_back(mean(v.first));
        em.push_back(mean(v.second));
      }
    }
    agg.per_run_acc_d.push_back(100.0 * mean(d));
    agg.per_run_acc_em.push_back(100.0 * mean(em));
  }
  agg.acc_d = mean(agg.per_run_acc_d);
  agg.acc_em = mean(agg.per_run_acc_em);
  return agg;
}

std::string format_percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

StatTestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw Error("EmptySample", "Mann-Whitney U needs two non-empty samples");
  struct Item {
    double value;
    bool from_a;
  };
  std::vector<Item> all;
  for (double x : a) all.push_back({x, true});
  for (double x : b) all.push_back({x, false});
  std::sort(all.begin(), all.end(), [](const Item& x, const Item& y) { return x.value < y.value; });

  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  double rank_sum_a = 0, tie_term = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].from_a) rank_sum_a += midrank;
    }
    i = j;
  }

  StatTestResult r;
  r.u_statistic = rank_sum_a - n1 * (n1 + 1) / 2.0;
  r.u_other = n1 * n2 - r.u_statistic;
  const double mu = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)));
  if (var <= 0) {
    r.degenerate = true;
    r.p_value = 1.0;
    return r;
  }
  const double diff = std::max(0.0, std::fabs(r.u_statistic - mu) - 0.5);
  r.z = diff / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(r.z / std::sqrt(2.0)));
  return r;
}

}  // namespace slicebench::metrics
