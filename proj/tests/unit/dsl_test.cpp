#include <algorithm>
#include <fstream>

#include "abeam/dsl/library.hpp"
#include "abeam/dsl/primitives.hpp"
#include "abeam/lang/typecheck.hpp"
#include "abeam/synth/task.hpp"
#include "doctest.h"
#include "support/random_terms.hpp"
#include "support/reference_interp.hpp"

using namespace abeam;

namespace {

const Ty I = Ty::integer();
const Ty L = Ty::int_list();
const Ty B = Ty::boolean();

Abstraction loop_abstraction() {
  Abstraction a;
  a.name = "fn_1";
  a.arity = 2;
  a.body = parse_term("(lam2 (Loop $1 0 (Len $1) $0))", toy_loop_dsl().symbols());
  a.signature = Ty::arrow({L, Ty::arrow({I}, L)}, L);
  a.iteration = 1;
  return a;
}

}  // namespace

TEST_CASE("default list DSL contents") {
  const Library lib = default_list_dsl();
  CHECK(lib.name() == "list");
  CHECK(lib.operations().size() == 30);
  CHECK(lib.constants().size() == 7);
  CHECK(lib.abstraction_count() == 0);
  REQUIRE(lib.find("Map") != nullptr);
  CHECK(lib.find("Map")->signature == Ty::arrow({Ty::arrow({I}, I), L}, L));
  CHECK(lib.find("Filter")->signature == Ty::arrow({Ty::arrow({I}, B), L}, L));
  CHECK(lib.find("ZipWith")->arity() == 3);
  const auto higher_order = std::count_if(lib.operations().begin(), lib.operations().end(), [](auto& op) {
    const auto& ps = op->signature.params();
    return std::any_of(ps.begin(), ps.end(), [](const Ty& p) { return p.kind() == TyKind::Arrow; });
  });
  CHECK(higher_order == 5);
  CHECK(validate_library(lib).empty());
  CHECK(validate_library(toy_loop_dsl()).empty());
  CHECK(toy_loop_dsl().operations().size() + toy_loop_dsl().constants().size() == 9);
}

TEST_CASE("validate reports duplicates and bad bodies") {
  Library lib = default_list_dsl();
  CHECK_THROWS_AS(lib.add_operation(make_primitive("Map", lib.find("Map")->signature)), LibraryError);

  Abstraction bad;
  bad.name = "fn_1";
  bad.arity = 1;
  bad.body = parse_term("(lam (Add $0 1))", lib.symbols());
  bad.signature = Ty::arrow({L}, I);
  CHECK_THROWS_AS(extend_with_abstraction(lib, bad), LibraryError);

  Abstraction clash = bad;
  clash.name = "Sum";
  clash.signature = Ty::arrow({I}, I);
  CHECK_THROWS_WITH_AS(extend_with_abstraction(lib, clash), doctest::Contains("Sum"), LibraryError);
}

TEST_CASE("make_primitive errors") {
  CHECK_THROWS_WITH_AS(make_primitive("Frobnicate", Ty::arrow({I}, I)), doctest::Contains("Frobnicate"),
                       LibraryError);
  CHECK_THROWS_AS(make_primitive("Add", Ty::arrow({L}, I)), LibraryError);
  CHECK_NOTHROW(make_primitive("Add", Ty::arrow({I, I}, I)));
}

TEST_CASE("extending with the loop abstraction") {
  const Library toy = toy_loop_dsl();
  const Library ext = extend_with_abstraction(toy, loop_abstraction());
  CHECK(ext.version() == toy.version() + 1);
  CHECK(ext.next_abstraction_id() == 2);
  CHECK(ext.abstraction_count() == 1);
  const Operation* op = ext.find("fn_1");
  REQUIRE(op != nullptr);
  CHECK(op->arity() == 2);
  CHECK(op->learned());
  CHECK(op->iteration_found == 1);
  CHECK(validate_library(ext).empty());
  // The original is untouched.
  CHECK(toy.find("fn_1") == nullptr);
  CHECK_THROWS_AS(extend_with_abstraction(ext, loop_abstraction()), LibraryError);
}

TEST_CASE("zero-arity abstractions become named constants") {
  const Library lib = default_list_dsl();
  Abstraction c;
  c.name = "fn_4";
  c.arity = 0;
  c.body = parse_term("(Range (Add 2 2))", lib.symbols());
  c.signature = L;
  const Library ext = extend_with_abstraction(lib, c);
  CHECK(ext.next_abstraction_id() == 5);
  const Constant* k = ext.find_constant("fn_4");
  REQUIRE(k != nullptr);
  CHECK(k->named());
  CHECK(k->type == L);
  CHECK(ext.symbol_types().at("fn_4") == L);
  TermPtr use = parse_term("(Sum fn_4)", ext.symbols());
  CHECK(evaluate(use, InputBinding{}, ext, EvalLimits{}).value == Value::integer(6));
  CHECK(validate_library(ext).empty());
}

TEST_CASE("learned operations behave like their inlined bodies") {
  const Library lib = default_list_dsl();
  Abstraction a;
  a.name = "fn_1";
  a.arity = 2;
  a.body = parse_term("(lam2 (Map (lam (Add $0 $1)) (Sort $1)))", lib.symbols());
  a.signature = Ty::arrow({L, I}, L);
  const Library ext = extend_with_abstraction(lib, a);

  testing::RandomTermGen gen(11, {});
  const std::vector<std::string> names{"xs", "k"};
  const SymbolTable syms = ext.symbols(names);
  const TermPtr via_op = parse_term("(fn_1 xs k)", syms);
  const TermPtr inlined = parse_term("(Map (lam (Add $0 k)) (Sort xs))", syms);
  for (int i = 0; i < 100; ++i) {
    InputBinding in{names, {Value::list(gen.small_list()), Value::integer(gen.small_int())}};
    EvalResult x = evaluate(via_op, in, ext, EvalLimits{});
    EvalResult y = evaluate(inlined, in, ext, EvalLimits{});
    CHECK(x.error == y.error);
    CHECK(x.value == y.value);
  }
}

TEST_CASE("save/load round trip") {
  Library ext = extend_with_abstraction(toy_loop_dsl(), loop_abstraction());
  const std::string text = save_library(ext);
  const Library back = load_library(text);
  CHECK(libraries_equal(ext, back));
  CHECK(back.version() == ext.version());
  CHECK(back.next_abstraction_id() == ext.next_abstraction_id());
  CHECK(save_library(back) == text);

  const Library dsl = default_list_dsl();
  CHECK(libraries_equal(load_library(save_library(dsl)), dsl));
  CHECK_FALSE(libraries_equal(dsl, ext));
}

TEST_CASE("loading an unknown primitive fails with its name") {
  std::string text = save_library(default_list_dsl());
  const auto pos = text.find("op Sum ");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 6, "op Frobnicate");
  CHECK_THROWS_WITH_AS(load_library(text), doctest::Contains("Frobnicate"), LibraryError);
  CHECK_THROWS_AS(load_library("not a library"), LibraryError);
}

TEST_CASE("versions increase along a chain of extensions") {
  Library lib = default_list_dsl();
  int last = lib.version();
  for (int k = 1; k <= 4; ++k) {
    Abstraction a;
    a.name = "fn_" + std::to_string(k);
    a.arity = 1;
    a.body = parse_term("(lam (Add $0 " + std::to_string(k) + "))", lib.symbols());
    a.signature = Ty::arrow({I}, I);
    lib = extend_with_abstraction(lib, a);
    CHECK(lib.version() > last);
    last = lib.version();
  }
  CHECK(lib.abstraction_count() == 4);
  CHECK(lib.next_abstraction_id() == 5);
}

TEST_CASE("restricting a library") {
  const std::vector<std::string> keep{"Add", "Map"};
  const Library r = restrict_library(default_list_dsl(), keep);
  CHECK(r.operations().size() == 2);
  CHECK(r.constants().size() == 7);
  CHECK(r.find("Sum") == nullptr);
}

// Each benchmark task ships with the reference program it was generated from.
// The substitution interpreter re-derives every output from that witness.
TEST_CASE("bundled benchmark tasks have witnesses of weight at most 15") {
  const char* d = std::getenv("ABEAM_DATA_DIR");
  const std::filesystem::path dir = std::filesystem::path(d ? d : "data") / "tasks";
  const Library lib = default_list_dsl();
  std::map<std::string, std::string> witness;
  std::ifstream spec(dir / "list_bench.spec");
  for (std::string line; std::getline(spec, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto a = line.find('\t'), b = line.find('\t', a + 1);
    witness[line.substr(0, a)] = line.substr(b + 1);
  }
  const auto tasks = load_tasks_file(dir / "list_bench.tasks");
  REQUIRE(tasks.size() == 40);
  REQUIRE(witness.size() == tasks.size());
  for (const auto& t : tasks) {
    CAPTURE(t.name);
    REQUIRE(witness.count(t.name) == 1);
    TermPtr p = parse_term(witness[t.name], lib.symbols(t.input_names));
    CHECK(term_size(p) <= 15);
    CHECK(infer_type(*p, t.input_type_map(), lib.symbol_types()) == t.output_type);
    for (const auto& ex : t.examples) {
      std::map<std::string, TermPtr> in;
      for (std::size_t i = 0; i < ex.inputs->names.size(); ++i) {
        const Value& v = ex.inputs->values[i];
        in[ex.inputs->names[i]] = v.is_list() ? Term::const_list(v.as_list()) : Term::const_int(v.as_int());
      }
      auto got = testing::ReferenceInterpreter(in).run(p);
      REQUIRE(got.has_value());
      const Value& want = ex.output;
      if (want.is_int()) CHECK((*got)->int_value() == want.as_int());
      if (want.is_list()) CHECK(*(*got)->list_value() == want.as_list());
    }
  }
}
