#include "slicebench/taxonomy/taxonomy.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>

namespace slicebench::taxonomy {

namespace {

struct CauseInfo {
  Cause cause;
  const char* code;
  const char* name;
  const char* category;
};

const std::vector<CauseInfo>& cause_table() {
  static const std::vector<CauseInfo> t = {
      {{RootCause::LogicConditional, {}}, "B1", "Conditional Statements", "Lack of Logic Understanding"},
      {{RootCause::LogicLoop, {}}, "B2", "Loops", "Lack of Logic Understanding"},
      {{RootCause::LogicMethodInvocation, {}}, "B3", "Method Invocations", "Lack of Logic Understanding"},
      {{RootCause::AmbiguityInCode, {}}, "C1", "Ambiguity in Code", "Code Complexity"},
      {{RootCause::ComplexControlFlow, {}}, "C2", "Complex Control Flow", "Code Complexity"},
      {{RootCause::ModelConstraint, ConstraintKind::ContextWindow}, "MC-ContextWindow", "Context Window",
       "Model-specific Constraints"},
      {{RootCause::ModelConstraint, ConstraintKind::IntermixedText}, "MC-IntermixedText", "Intermixed Text",
       "Model-specific Constraints"},
      {{RootCause::ModelConstraint, ConstraintKind::JsonParsing}, "MC-JsonParsing", "JSON Parsing",
       "Model-specific Constraints"},
  };
  return t;
}

const CauseInfo& info(const Cause& c) {
  for (const auto& i : cause_table()) {
    if (i.cause == c) return i;
  }
  throw TaxonomyError("InvalidLabel", c.cause == RootCause::ModelConstraint
                                          ? "a model-constraint root cause needs a sub-kind"
                                          : "only model-constraint root causes take a sub-kind");
}

struct LocationInfo {
  FaultLocation location;
  const char* code;
  const char* name;
};

const std::vector<LocationInfo>& location_table() {
  static const std::vector<LocationInfo> t = {
      {FaultLocation::ConditionalStatements, "A1", "Conditional Statements"},
      {FaultLocation::LoopConstructs, "A2", "Loop Constructs"},
      {FaultLocation::MethodInvocationsAndReturns, "A3", "Method Invocations and Returns"},
      {FaultLocation::VariableDeclarationsAndAssignments, "A4", "Variable Declarations and Assignments"},
      {FaultLocation::ClassDeclarations, "A5", "Class Declarations"},
      {FaultLocation::Imports, "A6", "Imports"},
  };
  return t;
}

std::vector<FaultLocation> normalize_locations(std::vector<FaultLocation> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (v.empty()) throw TaxonomyError("InvalidLabel", "a label needs at least one location");
  return v;
}

nlohmann::json locations_json(const std::vector<FaultLocation>& v) {
  auto arr = nlohmann::json::array();
  for (auto l : v) arr.push_back(code(l));
  return arr;
}

std::vector<FaultLocation> locations_from_json(const nlohmann::json& j) {
  std::vector<FaultLocation> out;
  for (const auto& x : j) out.push_back(location_from_code(x.get<std::string>()));
  return normalize_locations(std::move(out));
}

}  // namespace

std::string code(const Cause& c) { return info(c).code; }
std::string display_name(const Cause& c) { return info(c).name; }
std::string category_name(const Cause& c) { return info(c).category; }

Cause cause_from_code(const std::string& text) {
  for (const auto& i : cause_table()) {
    if (text == i.code) return i.cause;
  }
  throw TaxonomyError("InvalidLabel", "unknown root cause '" + text + "'");
}

const std::vector<Cause>& all_causes() {
  static const std::vector<Cause> v = [] {
    std::vector<Cause> out;
    for (const auto& i : cause_table()) out.push_back(i.cause);
    return out;
  }();
  return v;
}

std::string code(FaultLocation l) { return location_table()[static_cast<std::size_t>(l)].code; }
std::string display_name(FaultLocation l) { return location_table()[static_cast<std::size_t>(l)].name; }

FaultLocation location_from_code(const std::string& text) {
  for (const auto& i : location_table()) {
    if (text == i.code) return i.location;
  }
  throw TaxonomyError("InvalidLabel", "unknown fault location '" + text + "'");
}

const std::vector<FaultLocation>& all_locations() {
  static const std::vector<FaultLocation> v = [] {
    std::vector<FaultLocation> out;
    for (const auto& i : location_table()) out.push_back(i.location);
    return out;
  }();
  return v;
}

void to_json(nlohmann::json& j, const FailureLabel& l) {
  j = nlohmann::json{{"task_id", l.task_id},     {"root_cause", code(l.root_cause)},
                     {"locations", locations_json(l.locations)},
                     {"reviewer", l.reviewer},   {"timestamp", l.timestamp},
                     {"notes", l.notes},         {"version", l.version}};
}

void from_json(const nlohmann::json& j, FailureLabel& l) {
  l.task_id = j.at("task_id").get<std::string>();
  l.root_cause = cause_from_code(j.at("root_cause").get<std::string>());
  l.locations = locations_from_json(j.at("locations"));
  l.reviewer = j.value("reviewer", "");
  l.timestamp = j.value("timestamp", "");
  l.notes = j.value("notes", "");
  l.version = j.value("version", 0);
}

void to_json(nlohmann::json& j, const Resolution& r) {
  j = nlohmann::json{{"task_id", r.task_id},   {"root_cause", code(r.root_cause)},
                     {"locations", locations_json(r.locations)},
                     {"resolver", r.resolver}, {"timestamp", r.timestamp},
                     {"notes", r.notes}};
}

void from_json(const nlohmann::json& j, Resolution& r) {
  r.task_id = j.at("task_id").get<std::string>();
  r.root_cause = cause_from_code(j.at("root_cause").get<std::string>());
  r.locations = locations_from_json(j.at("locations"));
  r.resolver = j.value("resolver", "");
  r.timestamp = j.value("timestamp", "");
  r.notes = j.value("notes", "");
}

LabelStore::LabelStore(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw TaxonomyError("CorruptStore", path_.string() + ":" + std::to_string(number) + ": invalid JSON");
    }
    Entry e;
    if (j.value("type", "label") == "resolution") e.resolution = j.get<Resolution>();
    else e.label = j.get<FailureLabel>();
    entries_.push_back(std::move(e));
  }
}

void LabelStore::append(const nlohmann::json& j) {
  if (path_.empty()) return;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  out << j.dump() << '\n';
  out.flush();
  if (!out) throw Error("IoError", "cannot append to " + path_.string());
}

RecordOutcome LabelStore::record_label(FailureLabel label, const TaskLookup& lookup) {
  if (label.task_id.empty()) throw TaxonomyError("InvalidLabel", "label without a task id");
  info(label.root_cause);
  label.locations = normalize_locations(std::move(label.locations));
  if (lookup) {
    const auto failed = lookup(label.task_id);
    if (!failed) throw TaxonomyError("UnknownTask", "unknown task '" + label.task_id + "'");
    if (!*failed) throw TaxonomyError("NotAFailure", "task '" + label.task_id + "' matched its ground truth");
  }
  if (label.timestamp.empty()) label.timestamp = utc_timestamp();

  std::lock_guard lock(mutex_);
  int version = 1;
  for (const auto& e : entries_) {
    if (e.label && e.label->task_id == label.task_id && e.label->reviewer == label.reviewer) ++version;
  }
  label.version = version;
  nlohmann::json j = label;
  j["type"] = "label";
  append(j);
  entries_.push_back(Entry{label, std::nullopt});
  RecordOutcome out{label, false};
  effective_locked(label.task_id, out.disagreement);
  return out;
}

void LabelStore::resolve(Resolution resolution) {
  info(resolution.root_cause);
  resolution.locations = normalize_locations(std::move(resolution.locations));
  if (resolution.timestamp.empty()) resolution.timestamp = utc_timestamp();
  std::lock_guard lock(mutex_);
  nlohmann::json j = resolution;
  j["type"] = "resolution";
  append(j);
  entries_.push_back(Entry{std::nullopt, std::move(resolution)});
}

std::vector<FailureLabel> LabelStore::history(const std::string& task_id) const {
  std::lock_guard lock(mutex_);
  std::vector<FailureLabel> out;
  for (const auto& e : entries_) {
    if (e.label && e.label->task_id == task_id) out.push_back(*e.label);
  }
  return out;
}

std::vector<Resolution> LabelStore::resolutions(const std::string& task_id) const {
  std::lock_guard lock(mutex_);
  std::vector<Resolution> out;
  for (const auto& e : entries_) {
    if (e.resolution && e.resolution->task_id == task_id) out.push_back(*e.resolution);
  }
  return out;
}

std::vector<std::string> LabelStore::labeled_tasks() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    const std::string& id = e.label ? e.label->task_id : e.resolution->task_id;
    if (seen.insert(id).second) out.push_back(id);
  }
  return out;
}

std::optional<TaskLabel> LabelStore::effective_locked(const std::string& task_id, bool& disagreement) const {
  disagreement = false;
  // Latest label per reviewer with its position, and the latest resolution.
  std::map<std::string, std::pair<std::size_t, const FailureLabel*>> latest;
  std::optional<std::size_t> resolution_at;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.label && e.label->task_id == task_id) latest[e.label->reviewer] = {i, &*e.label};
    if (e.resolution && e.resolution->task_id == task_id) resolution_at = i;
  }
  if (latest.empty() && !resolution_at) return std::nullopt;
  const FailureLabel* first = nullptr;
  bool agree = true;
  std::size_t newest = 0;
  for (const auto& [_, v] : latest) {
    newest = std::max(newest, v.first);
    if (!first) first = v.second;
    else if (!(first->root_cause == v.second->root_cause && first->locations == v.second->locations)) agree = false;
  }
  if (resolution_at && (!first || *resolution_at > newest)) {
    const auto& r = *entries_[*resolution_at].resolution;
    return TaskLabel{task_id, r.root_cause, r.locations};
  }
  if (!agree) {
    disagreement = true;
    return std::nullopt;
  }
  return TaskLabel{task_id, first->root_cause, first->locations};
}

std::optional<TaskLabel> LabelStore::effective(const std::string& task_id) const {
  std::lock_guard lock(mutex_);
  bool disagreement = false;
  return effective_locked(task_id, disagreement);
}

std::vector<std::string> LabelStore::disagreements() const {
  std::vector<std::string> out;
  for (const auto& id : labeled_tasks()) {
    std::lock_guard lock(mutex_);
    bool d = false;
    effective_locked(id, d);
    if (d) out.push_back(id);
  }
  return out;
}

std::vector<TaskLabel> LabelStore::resolved_labels() const {
  std::vector<TaskLabel> out;
  std::vector<std::string> open;
  for (const auto& id : labeled_tasks()) {
    std::lock_guard lock(mutex_);
    bool d = false;
    auto l = effective_locked(id, d);
    if (d) open.push_back(id);
    else if (l) out.push_back(std::move(*l));
  }
  if (!open.empty()) {
    std::string msg = "unresolved reviewer disagreement on:";
    for (const auto& id : open) msg += " " + id;
    throw TaxonomyError("UnresolvedDisagreement", msg);
  }
  return out;
}

std::size_t LabelStore::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

Distribution distribution(const std::vector<TaskLabel>& labels) {
  Distribution d;
  for (const auto& c : all_causes()) d.root_causes[code(c)] = 0;
  for (auto l : all_locations()) d.locations[code(l)] = 0;
  d.total = labels.size();
  for (const auto& l : labels) {
    ++d.root_causes[code(l.root_cause)];
    for (auto loc : l.locations) {
      ++d.locations[code(loc)];
      ++d.location_memberships;
    }
  }
  return d;
}

double percent_of(std::size_t count, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

std::vector<FlowTriple> flow_map(const std::vector<TaskLabel>& labels) {
  std::map<std::pair<Cause, FaultLocation>, std::size_t> counts;
  for (const auto& l : labels) {
    for (auto loc : l.locations) ++counts[{l.root_cause, loc}];
  }
  std::vector<FlowTriple> out;
  for (const auto& [key, n] : counts) out.push_back({code(key.first), code(key.second), n});
  return out;
}

std::string flow_map_csv(const std::vector<FlowTriple>& flows) {
  std::string out = "root_cause,location,count\n";
  for (const auto& f : flows) out += f.root_cause + "," + f.location + "," + std::to_string(f.count) + "\n";
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace slicebench::taxonomy
