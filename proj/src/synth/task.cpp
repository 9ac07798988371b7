#include "abeam/synth/task.hpp"

#include <fstream>
#include <sstream>

namespace abeam {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Splits on commas outside brackets.
std::vector<std::string> split_top(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    if (s[i] == ']') --depth;
    if (s[i] == ',' && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  std::string last = trim(s.substr(start));
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

}  // namespace

Ty value_type(const Value& v) {
  if (v.is_int()) return Ty::integer();
  if (v.is_bool()) return Ty::boolean();
  return Ty::int_list();
}

TypeMap Task::input_type_map() const {
  TypeMap m;
  for (std::size_t i = 0; i < input_names.size(); ++i) m.emplace(input_names[i], input_types[i]);
  return m;
}

std::vector<std::string> validate_task(const Task& t) {
  std::vector<std::string> errs;
  if (t.name.empty()) errs.push_back("task has no name");
  if (t.input_names.size() != t.input_types.size()) errs.push_back("input names and types differ in length");
  if (t.examples.empty()) errs.push_back("task '" + t.name + "' has no examples");
  if (t.output_type.kind() == TyKind::Arrow) errs.push_back("output must be first-order");
  for (std::size_t i = 0; i < t.input_types.size(); ++i)
    if (t.input_types[i].kind() == TyKind::Arrow) errs.push_back("input '" + t.input_names[i] + "' must be first-order");
  for (std::size_t e = 0; e < t.examples.size(); ++e) {
    const Example& ex = t.examples[e];
    const std::string where = "example " + std::to_string(e + 1);
    if (!ex.inputs || ex.inputs->names != t.input_names) {
      errs.push_back(where + " does not bind exactly the declared inputs");
      continue;
    }
    for (std::size_t i = 0; i < t.input_types.size(); ++i)
      if (!(value_type(ex.inputs->values[i]) == t.input_types[i]))
        errs.push_back(where + ": input '" + t.input_names[i] + "' is not " + t.input_types[i].str());
    if (ex.output.is_closure() || !(value_type(ex.output) == t.output_type))
      errs.push_back(where + ": output is not " + t.output_type.str());
  }
  return errs;
}

Task make_task(std::string name, std::vector<std::pair<std::string, Ty>> inputs,
               const std::vector<std::pair<std::vector<Value>, Value>>& examples) {
  Task t;
  t.name = std::move(name);
  for (auto& [n, ty] : inputs) {
    t.input_names.push_back(n);
    t.input_types.push_back(ty);
  }
  for (const auto& [ins, out] : examples) {
    auto b = std::make_shared<InputBinding>();
    b->names = t.input_names;
    b->values = ins;
    t.examples.push_back({std::move(b), out});
  }
  t.output_type = t.examples.empty() ? Ty::integer() : value_type(t.examples.front().output);
  return t;
}

bool solves(const TermPtr& program, const Task& task, const OpTable& ops, const EvalLimits& limits) {
  for (const Example& ex : task.examples) {
    EvalResult r = evaluate(program, ex.inputs, ops, limits);
    if (!r.ok() || !(r.value == ex.output)) return false;
  }
  return !task.examples.empty();
}

std::vector<Task> parse_tasks(const std::string& text) {
  std::vector<Task> tasks;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;

  Task cur;
  bool have_output_decl = false, active = false;
  int doc_line = 0;

  auto flush = [&]() {
    if (!active) return;
    if (cur.name.empty()) throw TaskFormatError("task document without 'name:'", doc_line);
    if (!have_output_decl) {
      if (cur.examples.empty()) throw TaskFormatError("task '" + cur.name + "' has no examples", doc_line);
      cur.output_type = value_type(cur.examples.front().output);
    }
    auto errs = validate_task(cur);
    if (!errs.empty()) throw TaskFormatError(errs.front(), doc_line);
    tasks.push_back(std::move(cur));
    cur = Task{};
    have_output_decl = false;
    active = false;
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line == "---") {
      flush();
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw TaskFormatError("expected 'key: value'", lineno);
    if (!active) {
      active = true;
      doc_line = lineno;
    }
    const std::string key = trim(std::string_view(line).substr(0, colon));
    const std::string val = trim(std::string_view(line).substr(colon + 1));
    try {
      if (key == "name") {
        if (val.empty()) throw TaskFormatError("empty task name", lineno);
        cur.name = val;
      } else if (key == "inputs") {
        for (const std::string& decl : split_top(val)) {
          const auto c = decl.find(':');
          if (c == std::string::npos) throw TaskFormatError("input declaration needs name:type", lineno);
          cur.input_names.push_back(trim(std::string_view(decl).substr(0, c)));
          cur.input_types.push_back(parse_type(trim(std::string_view(decl).substr(c + 1))));
        }
      } else if (key == "output") {
        cur.output_type = parse_type(val);
        have_output_decl = true;
      } else if (key == "example") {
        const auto arrow = val.rfind("->");
        if (arrow == std::string::npos) throw TaskFormatError("example needs '->'", lineno);
        auto b = std::make_shared<InputBinding>();
        b->names = cur.input_names;
        b->values.resize(cur.input_names.size());
        std::vector<bool> seen(cur.input_names.size(), false);
        for (const std::string& bind : split_top(std::string_view(val).substr(0, arrow))) {
          const auto eq = bind.find('=');
          if (eq == std::string::npos) throw TaskFormatError("binding needs name=value", lineno);
          const std::string n = trim(std::string_view(bind).substr(0, eq));
          std::size_t i = 0;
          while (i < cur.input_names.size() && cur.input_names[i] != n) ++i;
          if (i == cur.input_names.size()) throw TaskFormatError("undeclared input '" + n + "'", lineno);
          if (seen[i]) throw TaskFormatError("input '" + n + "' bound twice", lineno);
          seen[i] = true;
          b->values[i] = parse_value(trim(std::string_view(bind).substr(eq + 1)));
        }
        for (std::size_t i = 0; i < seen.size(); ++i)
          if (!seen[i]) throw TaskFormatError("input '" + cur.input_names[i] + "' not bound", lineno);
        cur.examples.push_back({std::move(b), parse_value(trim(std::string_view(val).substr(arrow + 2)))});
      } else {
        throw TaskFormatError("unknown key '" + key + "'", lineno);
      }
    } catch (const TaskFormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw TaskFormatError(e.what(), lineno);
    }
  }
  flush();
  return tasks;
}

std::vector<Task> load_tasks_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw TaskFormatError("cannot open " + file.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tasks(ss.str());
}

std::string format_tasks(const std::vector<Task>& tasks) {
  std::ostringstream out;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const Task& t = tasks[k];
    if (k) out << "---\n";
    out << "name: " << t.name << "\ninputs: ";
    for (std::size_t i = 0; i < t.input_names.size(); ++i)
      out << (i ? ", " : "") << t.input_names[i] << ":" << t.input_types[i].str();
    out << "\noutput: " << t.output_type.str() << "\n";
    for (const Example& ex : t.examples) {
      out << "example: ";
      for (std::size_t i = 0; i < t.input_names.size(); ++i)
        out << (i ? ", " : "") << t.input_names[i] << "=" << ex.inputs->values[i].str();
      out << " -> " << ex.output.str() << "\n";
    }
  }
  return out.str();
}

}  // namespace abeam
