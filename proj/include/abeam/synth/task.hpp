#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "abeam/lang/eval.hpp"
#include "abeam/lang/typecheck.hpp"

namespace abeam {

struct Example {
  InputBindingPtr inputs;  // names in declaration order
  Value output;
};

/// A programming-by-example task.
struct Task {
  std::string name;
  std::vector<std::string> input_names;
  std::vector<Ty> input_types;
  Ty output_type;
  std::vector<Example> examples;

  TypeMap input_type_map() const;
};

/// Type of a first-order runtime value.
Ty value_type(const Value& v);

/// Empty when the task is well formed.
std::vector<std::string> validate_task(const Task& t);

/// Builds a task, inferring the output type from the first output.
Task make_task(std::string name, std::vector<std::pair<std::string, Ty>> inputs,
               const std::vector<std::pair<std::vector<Value>, Value>>& examples);

/// True when `program` reproduces every output exactly.
bool solves(const TermPtr& program, const Task& task, const OpTable& ops, const EvalLimits& limits);

class TaskFormatError : public std::runtime_error {
 public:
  TaskFormatError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Task documents separated by `---` lines:
///
///   name: sum_of_evens
///   inputs: l:list, k:int
///   output: int            (optional; inferred from the first example)
///   example: l=[1,2], k=3 -> 5
std::vector<Task> parse_tasks(const std::string& text);
std::vector<Task> load_tasks_file(const std::filesystem::path& file);
std::string format_tasks(const std::vector<Task>& tasks);

}  // namespace abeam
