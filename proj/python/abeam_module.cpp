#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "abeam/harness/driver.hpp"
#include "abeam/harness/stats.hpp"

namespace py = pybind11;
using namespace abeam;

namespace {

Value to_value(const py::handle& h) {
  if (py::isinstance<py::bool_>(h)) return Value::boolean(h.cast<bool>());
  if (py::isinstance<py::int_>(h)) return Value::integer(h.cast<std::int64_t>());
  if (py::isinstance<py::sequence>(h)) return Value::list(h.cast<IntList>());
  throw py::type_error("values are int, bool or a list of ints");
}

py::object from_value(const Value& v) {
  if (v.is_int()) return py::int_(v.as_int());
  if (v.is_bool()) return py::bool_(v.as_bool());
  if (v.is_list()) return py::cast(v.as_list());
  return py::str(v.str());
}

std::vector<std::string> keys_of(const py::dict& d) {
  std::vector<std::string> out;
  for (const auto& [k, _] : d) out.push_back(k.cast<std::string>());
  return out;
}

TypeMap type_map(const std::map<std::string, std::string>& inputs) {
  TypeMap m;
  for (const auto& [n, t] : inputs) m[n] = parse_type(t);
  return m;
}

std::vector<std::string> names_of(const std::map<std::string, std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& [n, _] : inputs) out.push_back(n);
  return out;
}

py::dict solve_dict(const SolveResult& r) {
  py::dict d;
  d["solved"] = r.solved;
  d["program"] = r.program ? py::object(py::str(print_term(r.program))) : py::object(py::none());
  d["weight"] = r.weight;
  d["elapsed"] = r.elapsed;
  d["candidates"] = r.candidates_evaluated;
  d["restarts"] = r.restarts;
  d["exhausted"] = r.exhausted;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bottom-up synthesis with learned guidance and abstraction mining";

  py::class_<Ty>(m, "Type").def("__str__", &Ty::str).def("__repr__", [](const Ty& t) { return "Type(" + t.str() + ")"; });

  py::class_<Library>(m, "Library")
      .def_property_readonly("name", &Library::name)
      .def_property_readonly("version", &Library::version)
      .def_property_readonly("operations",
                             [](const Library& lib) {
                               std::vector<std::string> out;
                               for (const auto& op : lib.operations()) out.push_back(op->name);
                               return out;
                             })
      .def("save", [](const Library& lib) { return save_library(lib); })
      .def("__eq__", [](const Library& a, const Library& b) { return libraries_equal(a, b); });

  m.def("list_library", &default_list_dsl, "The default list-processing library.");
  m.def("toy_library", &toy_loop_dsl, "The small loop library.");
  m.def("load_library", [](const std::string& text) { return load_library(text); });
  m.def("resolve_library", &resolve_library, py::arg("spec"), "list, toy or a library file path.");

  py::class_<Task>(m, "Task")
      .def_readonly("name", &Task::name)
      .def_readonly("input_names", &Task::input_names)
      .def_property_readonly("output_type", [](const Task& t) { return t.output_type.str(); })
      .def_property_readonly("examples",
                             [](const Task& t) {
                               py::list out;
                               for (const auto& ex : t.examples) {
                                 py::dict in;
                                 for (std::size_t i = 0; i < ex.inputs->names.size(); ++i)
                                   in[py::str(ex.inputs->names[i])] = from_value(ex.inputs->values[i]);
                                 out.append(py::make_tuple(in, from_value(ex.output)));
                               }
                               return out;
                             })
      .def("__repr__", [](const Task& t) { return "Task(" + t.name + ")"; });

  m.def(
      "make_task",
      [](const std::string& name, const std::map<std::string, std::string>& inputs, const py::list& examples) {
        std::vector<std::pair<std::string, Ty>> decl;
        for (const auto& [n, t] : inputs) decl.push_back({n, parse_type(t)});
        std::vector<std::pair<std::vector<Value>, Value>> ex;
        for (const auto& item : examples) {
          auto pair = item.cast<py::tuple>();
          auto in = pair[0].cast<py::dict>();
          std::vector<Value> vals;
          for (const auto& [n, _] : decl) vals.push_back(to_value(in[py::str(n)]));
          ex.push_back({vals, to_value(pair[1])});
        }
        return make_task(name, decl, ex);
      },
      py::arg("name"), py::arg("inputs"), py::arg("examples"),
      "inputs maps names to `int`, `bool` or `list`; examples are (inputs dict, output) pairs.");
  m.def("load_tasks", [](const std::filesystem::path& p) { return load_tasks_file(p); });
  m.def("parse_tasks", &parse_tasks);

  m.def(
      "evaluate",
      [](const std::string& program, const Library& lib, const py::dict& inputs) {
        const auto names = keys_of(inputs);
        std::vector<Value> vals;
        for (const auto& n : names) vals.push_back(to_value(inputs[py::str(n)]));
        EvalResult r = evaluate(parse_term(program, lib.symbols(names)), InputBinding{names, vals}, lib, EvalLimits{});
        if (!r.ok()) throw py::value_error(std::string("evaluation failed: ") + to_string(r.error));
        return from_value(r.value);
      },
      py::arg("program"), py::arg("library"), py::arg("inputs") = py::dict());
  m.def(
      "program_size",
      [](const std::string& program, const Library& lib, const std::vector<std::string>& inputs) {
        return term_size(parse_term(program, lib.symbols(inputs)));
      },
      py::arg("program"), py::arg("library"), py::arg("inputs") = std::vector<std::string>{});

  m.def(
      "solve",
      [](const Task& task, const Library& lib, double timeout, int beam_size, int max_weight, std::uint64_t seed,
         std::optional<std::filesystem::path> scorer_file) {
        SearchConfig cfg;
        cfg.per_task_timeout = timeout;
        cfg.restart_interval = std::min(cfg.restart_interval, timeout);
        cfg.beam_size = beam_size;
        cfg.max_weight = max_weight;
        cfg.random_seed = seed;
        py::gil_scoped_release release;
        if (scorer_file) return search(task, lib, load_scorer_file(*scorer_file), cfg);
        return search(task, lib, UniformScorer{}, cfg);
      },
      py::arg("task"), py::arg("library"), py::arg("timeout") = 5.0, py::arg("beam_size") = 10,
      py::arg("max_weight") = 15, py::arg("seed") = 0, py::arg("scorer_file") = py::none());
  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("solved", &SolveResult::solved)
      .def_property_readonly("program",
                             [](const SolveResult& r) { return r.program ? print_term(r.program) : std::string(); })
      .def_readonly("weight", &SolveResult::weight)
      .def_readonly("elapsed", &SolveResult::elapsed)
      .def_readonly("candidates", &SolveResult::candidates_evaluated)
      .def_readonly("restarts", &SolveResult::restarts)
      .def_readonly("exhausted", &SolveResult::exhausted)
      .def("as_dict", &solve_dict);

  m.def(
      "mine",
      [](const std::vector<std::tuple<std::string, std::string, std::map<std::string, std::string>>>& programs,
         const Library& lib, int max_rounds, int max_arity, int iteration) {
        Corpus corpus;
        for (const auto& [task, text, inputs] : programs)
          corpus.push_back({task, parse_term(text, lib.symbols(names_of(inputs))), type_map(inputs)});
        MiningConfig cfg;
        cfg.max_rounds = max_rounds;
        cfg.max_arity = max_arity;
        MineResult r = mine(corpus, lib, cfg, iteration);
        py::list abstractions;
        for (const auto& a : r.abstractions) {
          py::dict d;
          d["name"] = a.name;
          d["arity"] = a.arity;
          d["body"] = print_term(a.body);
          d["type"] = a.signature.str();
          d["tasks"] = a.found_in_tasks;
          d["utility"] = a.utility.value;
          abstractions.append(d);
        }
        std::vector<std::string> rewritten;
        for (const auto& p : r.corpus) rewritten.push_back(print_term(p.program));
        py::dict out;
        out["abstractions"] = abstractions;
        out["programs"] = rewritten;
        out["library"] = r.library;
        return out;
      },
      py::arg("programs"), py::arg("library"), py::arg("max_rounds") = 5, py::arg("max_arity") = 3,
      py::arg("iteration") = 1, "programs are (task name, program text, {input: type}) triples.");

  m.def(
      "run_loop",
      [](const std::vector<Task>& tasks, const std::map<std::string, std::string>& settings, const std::string& config_text) {
        RunConfig cfg = parse_run_config(config_text);
        for (const auto& [k, v] : settings) set_config_value(cfg, k, v);
        if (auto errs = cfg.validate(); !errs.empty()) throw ConfigError(errs.front());
        py::gil_scoped_release release;
        LoopResult r = wake_sleep_loop(tasks, cfg);
        std::vector<std::pair<int, int>> solved;
        for (const auto& rep : r.reports) solved.push_back({rep.iteration, rep.solved()});
        return std::make_tuple(solved, r.best_iteration, r.library);
      },
      py::arg("tasks"), py::arg("settings") = std::map<std::string, std::string>{}, py::arg("config_text") = "",
      "Runs the wake-sleep loop; returns ([(iteration, solved)], best iteration, final library).");
  m.def("config_keys", &config_keys);

  m.def("mean", [](const std::vector<double>& xs) { return mean(xs); });
  m.def("ci95_half_width", [](const std::vector<double>& xs) { return ci95_half_width(xs); });
  m.def("t_test", [](const std::vector<double>& a, const std::vector<double>& b) {
    TTestResult r = t_test(a, b);
    return py::make_tuple(r.t, r.p, r.df);
  });

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<TaskFormatError>(m, "TaskFormatError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TypeError>(m, "ProgramTypeError", PyExc_TypeError);
}
