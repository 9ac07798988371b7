// Builds a task file from reference programs. Each spec line is
//   name <TAB> inputs <TAB> program
// with inputs like `l:list, k:int`. Example inputs are drawn from a seeded
// generator and redrawn until the program runs without error.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "abeam/harness/config.hpp"

using namespace abeam;

int main(int argc, char** argv) {
  CLI::App app{"Generate a task file from reference programs"};
  std::string spec, out, library = "list";
  int examples = 4, min_len = 3, max_len = 6;
  std::uint64_t seed = 1;
  app.add_option("--spec", spec, "name<TAB>inputs<TAB>program lines")->required();
  app.add_option("--out", out, "task file")->required();
  app.add_option("--library", library, "list, toy or a library file");
  app.add_option("--examples", examples, "examples per task");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--min-len", min_len, "shortest input list");
  app.add_option("--max-len", max_len, "longest input list");
  CLI11_PARSE(app, argc, argv);

  Library lib = resolve_library(library);
  std::ifstream in(spec);
  if (!in) {
    std::cerr << "cannot read " << spec << "\n";
    return 1;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> elem(-5, 9), ival(-3, 6), len(min_len, max_len);
  std::vector<Task> tasks;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name, decls, program;
    std::getline(ls, name, '\t');
    std::getline(ls, decls, '\t');
    std::getline(ls, program);
    if (program.empty()) {
      std::cerr << spec << ":" << lineno << ": expected three tab-separated fields\n";
      return 1;
    }
    std::vector<std::pair<std::string, Ty>> inputs;
    std::vector<std::string> names;
    std::istringstream ds(decls);
    for (std::string d; std::getline(ds, d, ',');) {
      d.erase(0, d.find_first_not_of(' '));
      const auto colon = d.find(':');
      const std::string n = d.substr(0, colon), t = d.substr(colon + 1);
      inputs.push_back({n, t == "int" ? Ty::integer() : t == "bool" ? Ty::boolean() : Ty::int_list()});
      names.push_back(n);
    }
    TermPtr p;
    try {
      p = parse_term(program, lib.symbols(names));
      TypeMap types;
      for (const auto& [n, t] : inputs) types[n] = t;
      infer_type(*p, types, lib.symbol_types());
    } catch (const std::exception& e) {
      std::cerr << spec << ":" << lineno << ": " << e.what() << "\n";
      return 1;
    }
    std::vector<std::pair<std::vector<Value>, Value>> ex;
    for (int tries = 0; static_cast<int>(ex.size()) < examples && tries < 1000; ++tries) {
      std::vector<Value> vals;
      for (const auto& [n, t] : inputs) {
        if (t == Ty::integer()) {
          vals.push_back(Value::integer(ival(rng)));
        } else if (t == Ty::boolean()) {
          vals.push_back(Value::boolean(rng() % 2 == 0));
        } else {
          IntList l(static_cast<std::size_t>(len(rng)));
          for (auto& x : l) x = elem(rng);
          vals.push_back(Value::list(std::move(l)));
        }
      }
      EvalResult r = evaluate(p, InputBinding{names, vals}, lib, EvalLimits{});
      if (r.ok()) ex.push_back({vals, r.value});
    }
    if (static_cast<int>(ex.size()) < examples) {
      std::cerr << name << ": no error-free examples found\n";
      return 1;
    }
    tasks.push_back(make_task(name, inputs, ex));
  }
  std::ofstream o(out);
  o << format_tasks(tasks);
  std::cout << tasks.size() << " tasks\n";
  return 0;
}
