#include <map>

#include "abeam/dsl/library.hpp"
#include "abeam/lang/eval.hpp"
#include "abeam/lang/syntax.hpp"
#include "abeam/lang/typecheck.hpp"
#include "doctest.h"
#include "support/random_terms.hpp"
#include "support/reference_interp.hpp"

using namespace abeam;

namespace {

SymbolTable list_symbols(std::vector<std::string> inputs = {}) {
  return default_list_dsl().symbols(inputs);
}

}  // namespace

TEST_CASE("parse nested lambdas into de Bruijn terms") {
  SymbolTable s;
  s.operations = {"+"};
  TermPtr t = parse_term("(lam (lam (+ $1 $0)))", s);
  REQUIRE(t->kind() == TermKind::Lam);
  CHECK(t->arity() == 1);
  const TermPtr& inner = t->body();
  REQUIRE(inner->kind() == TermKind::Lam);
  const TermPtr& app = inner->body();
  REQUIRE(app->is_prim_call());
  CHECK(app->fn()->name() == "+");
  CHECK(app->args()[0]->kind() == TermKind::BoundVar);
  CHECK(app->args()[0]->index() == 1);
  CHECK(app->args()[1]->index() == 0);
  CHECK(print_term(t) == "(lam (lam (+ $1 $0)))");
}

TEST_CASE("parse errors") {
  SymbolTable s = list_symbols({"x"});
  CHECK_THROWS_WITH_AS(parse_term("$0", s), doctest::Contains("unbound index"), ParseError);
  CHECK_THROWS_AS(parse_term("(lam $1)", s), ParseError);
  CHECK_NOTHROW(parse_term("(lam2 (Add $1 $0))", s));
  try {
    parse_term("(Add x Frobnicate)", s);
    FAIL("expected unknown symbol");
  } catch (const UnknownSymbolError& e) {
    CHECK(e.token() == "Frobnicate");
    CHECK(e.offset() == 7);
  }
  try {
    parse_term("(Add 1 2", s);
    FAIL("expected syntax error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
  }
  CHECK_THROWS_AS(parse_term("(Add 1 2))", s), ParseError);
  CHECK_THROWS_AS(parse_term("()", s), ParseError);
  CHECK_THROWS_AS(parse_term("(Head)", s), ParseError);
  CHECK_THROWS_AS(parse_term("??0", s), ParseError);
  s.allow_holes = true;
  CHECK(parse_term("(Add 3 ??0)", s)->args()[1]->kind() == TermKind::Hole);
}

TEST_CASE("print literal forms") {
  CHECK(print_term(Term::lam(1, Term::bound_var(0))) == "(lam $0)");
  CHECK(print_term(Term::call("Add", {Term::const_int(1), Term::const_int(2)})) == "(Add 1 2)");
  CHECK(print_term(Term::lam(3, Term::bound_var(2))) == "(lam3 $2)");
  CHECK(print_term(Term::const_list({1, -2, 3})) == "[1,-2,3]");
  SymbolTable s;
  CHECK(print_term(parse_term("[ 1 , 2  3 ]", s)) == "[1,2,3]");
  CHECK(print_term(parse_term("  true ", s)) == "true");
}

TEST_CASE("print/parse round trip on random terms") {
  const Ty I = Ty::integer(), L = Ty::int_list();
  testing::RandomTermGen gen(7, {{"xs", L}, {"k", I}});
  SymbolTable s = list_symbols({"xs", "k"});
  const Ty types[] = {I, L, Ty::boolean(), Ty::arrow({I}, I), Ty::arrow({I, I}, I)};
  for (int i = 0; i < 1000; ++i) {
    TermPtr t = gen.gen(types[i % 5], 4);
    const std::string text = print_term(t);
    TermPtr back = parse_term(text, s);
    CHECK(structurally_equal(t, back));
    CHECK(print_term(back) == text);
    CHECK(is_closed(*back));
  }
}

TEST_CASE("type inference") {
  const Library lib = default_list_dsl();
  TypeMap inputs;
  const Ty I = Ty::integer(), L = Ty::int_list();

  TermPtr add2 = Term::lam(2, Term::call("Add", {Term::bound_var(1), Term::bound_var(0)}));
  CHECK(infer_type(*add2, inputs, lib.symbol_types()) == Ty::arrow({I, I}, I));

  TermPtr bad = Term::call("Sort", {Term::const_int(3)});
  try {
    infer_type(*bad, inputs, lib.symbol_types());
    FAIL("expected a type error");
  } catch (const TypeError& e) {
    CHECK(e.path() == std::vector<int>{1});
    CHECK(std::string(e.what()).find("expected list, got int") != std::string::npos);
  }

  inputs["xs"] = L;
  SymbolTable s = lib.symbols(std::vector<std::string>{"xs"});
  CHECK(infer_type(*parse_term("(Map (lam (Multiply $0 2)) xs)", s), inputs, lib.symbol_types()) == L);
  CHECK(infer_type(*parse_term("(ZipWith (lam2 (Subtract $1 $0)) xs xs)", s), inputs,
                   lib.symbol_types()) == L);
  CHECK_THROWS_AS(infer_type(*parse_term("(Map (lam2 (Add $1 $0)) xs)", s), inputs, lib.symbol_types()),
                  TypeError);
  CHECK_THROWS_AS(infer_type(*parse_term("(Add xs 1)", s), inputs, lib.symbol_types()), TypeError);
  CHECK_THROWS_AS(infer_type(*parse_term("(lam $0)", s), inputs, lib.symbol_types()), TypeError);
  CHECK_THROWS_AS(infer_type(*Term::input_var("nope"), inputs, lib.symbol_types()), TypeError);
  CHECK_THROWS_AS(infer_type(*Term::call("Frob", {Term::const_int(1)}), inputs, lib.symbol_types()),
                  TypeError);
  CHECK_THROWS_AS(infer_type(*Term::call("Add", {Term::const_int(1)}), inputs, lib.symbol_types()),
                  TypeError);

  std::vector<Ty> node_types;
  TypeContext ctx;
  ctx.inputs = &inputs;
  ctx.symbols = &lib.symbol_types();
  ctx.node_types = &node_types;
  infer_type(*parse_term("(Map (lam (Add $0 1)) xs)", s), ctx);
  // Apply, Map, Lam, Add-apply, Add, $0, 1, xs
  REQUIRE(node_types.size() == 8);
  CHECK(node_types[0] == L);
  CHECK(node_types[2] == Ty::arrow({I}, I));
  CHECK(node_types[5] == I);
  CHECK(node_types[7] == L);
}

TEST_CASE("evaluate basics and recoverable errors") {
  const Library lib = default_list_dsl();
  SymbolTable s = lib.symbols(std::vector<std::string>{"xs"});
  InputBinding in{{"xs"}, {Value::list(IntList{3, 1, 2})}};
  EvalLimits lim;

  auto run = [&](const std::string& text) { return evaluate(parse_term(text, s), in, lib, lim); };
  CHECK(run("(Add 1 2)").value == Value::integer(3));
  CHECK(run("(Sort xs)").value == Value::list(IntList{1, 2, 3}));
  CHECK(run("(Map (lam (Multiply $0 2)) xs)").value == Value::list(IntList{6, 2, 4}));
  CHECK(run("(ZipWith (lam2 (Subtract $1 $0)) xs (Reverse xs))").value ==
        Value::list(IntList{1, 0, -1}));
  CHECK(run("(Scanl1 (lam2 (Add $1 $0)) xs)").value == Value::list(IntList{3, 4, 6}));
  CHECK(run("(Head (Filter (lam (Greater $0 5)) xs))").error == EvalError::Domain);
  CHECK(run("(Divide 1 0)").error == EvalError::Domain);
  CHECK(run("(Multiply 2147483647 2)").error == EvalError::ValueBound);
  CHECK(run("(Range 2000)").error == EvalError::ValueBound);
  EvalLimits tight;
  tight.max_steps = 5;
  CHECK(evaluate(parse_term("(Sum (Map (lam (Add $0 1)) xs))", s), in, lib, tight).error ==
        EvalError::StepLimit);
  // A lambda that closes over an input.
  CHECK(run("(Map (lam (Add $0 (Length xs))) xs)").value == Value::list(IntList{6, 4, 5}));
  // Closure results are values too.
  CHECK(run("(lam (Add $0 1))").value.is_closure());
}

TEST_CASE("worked loop example sizes and semantics") {
  Library toy = toy_loop_dsl();
  SymbolTable s = toy.symbols(std::vector<std::string>{"l"});
  TermPtr p = parse_term("(Loop l 0 (Len l) (lam (If (IsEven $0) (Double $0))))", s);
  CHECK(term_size(p) == 8);
  InputBinding in{{"l"}, {Value::list(IntList{1, 2, 3, 4})}};
  CHECK(evaluate(p, in, toy, EvalLimits{}).value == Value::list(IntList{4, 8}));

  Abstraction a;
  a.name = "fn_1";
  a.arity = 2;
  a.body = parse_term("(lam2 (Loop $1 0 (Len $1) $0))", toy.symbols());
  a.signature = Ty::arrow({Ty::int_list(), Ty::arrow({Ty::integer()}, Ty::int_list())}, Ty::int_list());
  Library ext = extend_with_abstraction(toy, a);
  TermPtr pab = parse_term("(fn_1 l (lam (If (IsEven $0) (Double $0))))", ext.symbols(std::vector<std::string>{"l"}));
  CHECK(term_size(pab) == 5);
  CHECK(evaluate(pab, in, ext, EvalLimits{}).value == Value::list(IntList{4, 8}));

  CHECK(term_size(Term::const_int(0)) == 1);
  CHECK(term_size(Term::lam(1, Term::bound_var(0))) == 0);
}

TEST_CASE("evaluator agrees with a substitution-based reference interpreter") {
  const Library lib = default_list_dsl();
  const Ty I = Ty::integer(), L = Ty::int_list(), B = Ty::boolean();
  testing::RandomTermGen gen(2024, {{"xs", L}, {"ys", L}, {"k", I}});
  int compared = 0, errors = 0;
  TypeMap in_types{{"xs", L}, {"ys", L}, {"k", I}};
  for (int i = 0; i < 10000; ++i) {
    const Ty& t = i % 3 == 0 ? I : (i % 3 == 1 ? L : B);
    TermPtr term = gen.gen(t, 4);
    REQUIRE(infer_type(*term, in_types, lib.symbol_types()) == t);
    IntList xs = gen.small_list(), ys = gen.small_list();
    std::int64_t k = gen.small_int();
    InputBinding in{{"xs", "ys", "k"}, {Value::list(xs), Value::list(ys), Value::integer(k)}};
    EvalResult got = evaluate(term, in, lib, EvalLimits{});
    REQUIRE(got.error != EvalError::Invalid);  // well-typed terms never hit arity/kind errors
    REQUIRE(got.error != EvalError::StepLimit);
    testing::ReferenceInterpreter ref(
        {{"xs", Term::const_list(xs)}, {"ys", Term::const_list(ys)}, {"k", Term::const_int(k)}});
    auto want = ref.run(term);
    REQUIRE(want.has_value() == got.ok());
    if (!want) {
      ++errors;
      continue;
    }
    ++compared;
    if (got.value.is_int()) CHECK(got.value.as_int() == (*want)->int_value());
    if (got.value.is_bool()) CHECK(got.value.as_bool() == (*want)->bool_value());
    if (got.value.is_list()) CHECK(got.value.as_list() == *(*want)->list_value());
    // Determinism.
    EvalResult again = evaluate(term, in, lib, EvalLimits{});
    CHECK(again.error == got.error);
    CHECK(again.value == got.value);
  }
  CHECK(compared > 5000);
  MESSAGE("compared " << compared << " values, " << errors << " shared error outcomes");
}
