#pragma once
// Batch job documents ("nevlab/1"): parsing, serialization, execution and
// report writing.

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nevlab/herglotz.hpp"
#include "nevlab/matnum.hpp"

namespace nevlab::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "nevlab/1";

struct Entity {
  std::string name;
  std::string kind;  // herglotz | pair | sturm_liouville | ex4a | diagonal_sequence
  Json spec;         // kind-specific fields, without name and kind

  bool operator==(const Entity&) const = default;
};

struct Task {
  std::string name;
  std::string kind;
  std::string target;  // empty for harnack
  Json params;         // kind-specific fields, without name, kind and target

  bool operator==(const Task&) const = default;
};

struct OutputSpec {
  std::string directory = "nevlab-out";
  std::vector<std::string> formats{"json", "csv"};

  bool operator==(const OutputSpec&) const = default;
};

struct JobDocument {
  std::string version = kVersion;
  std::uint64_t seed = 0;
  TolerancePolicy tol;
  Json grid = "default";  // "default" | "extended" | [[re, im], ...]
  std::vector<Entity> entities;
  std::vector<Task> tasks;
  OutputSpec output;

  bool operator==(const JobDocument& other) const;
};

/// Carries every problem found, not just the first.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

JobDocument parse(std::string_view text);
Json to_json(const JobDocument& doc);
std::string serialize(const JobDocument& doc);

/// Checks references, kinds and parameters, and builds every entity once.
/// Returns the list of problems (empty when valid).
std::vector<std::string> validate(const JobDocument& doc);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct TaskResult {
  std::string name;
  std::string kind;
  std::string target;
  bool pass = false;
  Json summary = Json::object();
  Table table;
  Table series;  // optional plot data, written as <task>.series.csv
};

struct RunResult {
  std::vector<TaskResult> tasks;
  bool pass = false;
};

/// Executes tasks in declaration order. Numerical failures are recorded in
/// the task result.
RunResult run(const JobDocument& doc);

/// Writes <task>.json / <task>.csv (and series) plus summary.json into
/// output.directory. Throws std::runtime_error on I/O failure.
void write_reports(const RunResult& result, const JobDocument& doc);

std::string to_csv(const Table& table);
Json to_json(const TaskResult& result);

/// Parses "default", "extended" or "re,im;re,im;...".
Json grid_from_flag(std::string_view text);
ZGrid resolve_grid(const Json& grid, std::uint64_t seed);

}  // namespace nevlab::cli
