#include "abeam/dsl/primitives.hpp"

#include <algorithm>

namespace abeam {
namespace {

using Args = std::span<const Value>;

Ty I() { return Ty::integer(); }
Ty B() { return Ty::boolean(); }
Ty L() { return Ty::int_list(); }
Ty F(std::vector<Ty> p, Ty r) { return Ty::arrow(std::move(p), std::move(r)); }

std::int64_t int_result(const Value& v, CallContext& ctx) {
  if (!v.is_int()) ctx.fail(EvalError::Invalid);
  return v.as_int();
}

bool bool_result(const Value& v, CallContext& ctx) {
  if (!v.is_bool()) ctx.fail(EvalError::Invalid);
  return v.as_bool();
}

Value make_list(IntList xs, CallContext& ctx) {
  ctx.check_len(xs.size());
  return Value::list(std::move(xs));
}

// Arithmetic ----------------------------------------------------------------

Value add(Args a, CallContext& c) {
  return Value::integer(c.checked_int(static_cast<__int128>(a[0].as_int()) + a[1].as_int()));
}
Value subtract(Args a, CallContext& c) {
  return Value::integer(c.checked_int(static_cast<__int128>(a[0].as_int()) - a[1].as_int()));
}
Value multiply(Args a, CallContext& c) {
  return Value::integer(c.checked_int(static_cast<__int128>(a[0].as_int()) * a[1].as_int()));
}
Value divide(Args a, CallContext& c) {
  const std::int64_t x = a[0].as_int(), y = a[1].as_int();
  if (y == 0) c.fail(EvalError::Domain);
  std::int64_t q = x / y;
  if ((x % y != 0) && ((x < 0) != (y < 0))) --q;  // floor
  return Value::integer(c.checked_int(q));
}
Value min2(Args a, CallContext&) { return Value::integer(std::min(a[0].as_int(), a[1].as_int())); }
Value max2(Args a, CallContext&) { return Value::integer(std::max(a[0].as_int(), a[1].as_int())); }
Value double_(Args a, CallContext& c) {
  return Value::integer(c.checked_int(static_cast<__int128>(a[0].as_int()) * 2));
}

// Predicates ------------------------------------------------------------------

Value is_even(Args a, CallContext&) { return Value::boolean(a[0].as_int() % 2 == 0); }
Value is_odd(Args a, CallContext&) { return Value::boolean(a[0].as_int() % 2 != 0); }
Value is_positive(Args a, CallContext&) { return Value::boolean(a[0].as_int() > 0); }
Value greater(Args a, CallContext&) { return Value::boolean(a[0].as_int() > a[1].as_int()); }
Value if_(Args a, CallContext&) { return a[0].as_bool() ? a[1] : a[2]; }
// Toy conditional: keeps the element as a singleton list or drops it.
Value keep_if(Args a, CallContext&) {
  return a[0].as_bool() ? Value::list(IntList{a[1].as_int()}) : Value::list(IntList{});
}

// List -> int -------------------------------------------------------------------

Value head(Args a, CallContext& c) {
  const auto& l = a[0].as_list();
  if (l.empty()) c.fail(EvalError::Domain);
  return Value::integer(l.front());
}
Value last(Args a, CallContext& c) {
  const auto& l = a[0].as_list();
  if (l.empty()) c.fail(EvalError::Domain);
  return Value::integer(l.back());
}
Value length(Args a, CallContext&) {
  return Value::integer(static_cast<std::int64_t>(a[0].as_list().size()));
}
Value sum(Args a, CallContext& c) {
  const auto& l = a[0].as_list();
  c.tick(static_cast<std::int64_t>(l.size()));
  __int128 s = 0;
  for (auto x : l) s += x;
  return Value::integer(c.checked_int(s));
}
Value minimum(Args a, CallContext& c) {
  const auto& l = a[0].as_list();
  if (l.empty()) c.fail(EvalError::Domain);
  return Value::integer(*std::min_element(l.begin(), l.end()));
}
Value maximum(Args a, CallContext& c) {
  const auto& l = a[0].as_list();
  if (l.empty()) c.fail(EvalError::Domain);
  return Value::integer(*std::max_element(l.begin(), l.end()));
}
Value access(Args a, CallContext& c) {
  const auto i = a[0].as_int();
  const auto& l = a[1].as_list();
  if (i < 0 || i >= static_cast<std::int64_t>(l.size())) c.fail(EvalError::Domain);
  return Value::integer(l[static_cast<std::size_t>(i)]);
}

// List -> list --------------------------------------------------------------------

Value reverse(Args a, CallContext& c) {
  IntList l = a[0].as_list();
  c.tick(static_cast<std::int64_t>(l.size()));
  std::reverse(l.begin(), l.end());
  return Value::list(std::move(l));
}
Value sort(Args a, CallContext& c) {
  IntList l = a[0].as_list();
  c.tick(static_cast<std::int64_t>(l.size()));
  std::sort(l.begin(), l.end());
  return Value::list(std::move(l));
}
Value take(Args a, CallContext& c) {
  const auto n = a[0].as_int();
  const auto& l = a[1].as_list();
  if (n < 0) c.fail(EvalError::Domain);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(n), l.size());
  return Value::list(IntList(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(k)));
}
Value drop(Args a, CallContext& c) {
  const auto n = a[0].as_int();
  const auto& l = a[1].as_list();
  if (n < 0) c.fail(EvalError::Domain);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(n), l.size());
  return Value::list(IntList(l.begin() + static_cast<std::ptrdiff_t>(k), l.end()));
}
Value append(Args a, CallContext& c) {
  IntList l = a[0].as_list();
  l.push_back(a[1].as_int());
  return make_list(std::move(l), c);
}
Value concat(Args a, CallContext& c) {
  IntList l = a[0].as_list();
  const auto& r = a[1].as_list();
  c.check_len(l.size() + r.size());
  l.insert(l.end(), r.begin(), r.end());
  return Value::list(std::move(l));
}
Value range(Args a, CallContext& c) {
  const auto n = a[0].as_int();
  if (n < 0) c.fail(EvalError::Domain);
  c.check_len(static_cast<std::size_t>(n));
  c.tick(n);
  IntList l(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) l[static_cast<std::size_t>(i)] = i;
  return Value::list(std::move(l));
}

// Higher-order ----------------------------------------------------------------

Value map(Args a, CallContext& c) {
  const auto& l = a[1].as_list();
  IntList out;
  out.reserve(l.size());
  for (auto x : l) {
    const Value arg = Value::integer(x);
    out.push_back(int_result(c.call(a[0], {&arg, 1}), c));
  }
  return Value::list(std::move(out));
}
Value filter(Args a, CallContext& c) {
  const auto& l = a[1].as_list();
  IntList out;
  for (auto x : l) {
    const Value arg = Value::integer(x);
    if (bool_result(c.call(a[0], {&arg, 1}), c)) out.push_back(x);
  }
  return Value::list(std::move(out));
}
Value count(Args a, CallContext& c) {
  std::int64_t n = 0;
  for (auto x : a[1].as_list()) {
    const Value arg = Value::integer(x);
    if (bool_result(c.call(a[0], {&arg, 1}), c)) ++n;
  }
  return Value::integer(n);
}
Value zip_with(Args a, CallContext& c) {
  const auto& l = a[1].as_list();
  const auto& r = a[2].as_list();
  const std::size_t n = std::min(l.size(), r.size());
  IntList out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Value args[2] = {Value::integer(l[i]), Value::integer(r[i])};
    out.push_back(int_result(c.call(a[0], args), c));
  }
  return Value::list(std::move(out));
}
Value scanl1(Args a, CallContext& c) {
  const auto& l = a[1].as_list();
  IntList out;
  out.reserve(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (i == 0) {
      out.push_back(l[0]);
      continue;
    }
    const Value args[2] = {Value::integer(out.back()), Value::integer(l[i])};
    out.push_back(int_result(c.call(a[0], args), c));
  }
  return Value::list(std::move(out));
}
// Toy loop: concatenates f(l[i]) for start <= i < stop.
Value loop(Args a, CallContext& c) {
  const auto& l = a[0].as_list();
  const auto start = a[1].as_int(), stop = a[2].as_int();
  IntList out;
  for (std::int64_t i = start; i < stop; ++i) {
    if (i < 0 || i >= static_cast<std::int64_t>(l.size())) c.fail(EvalError::Domain);
    const Value arg = Value::integer(l[static_cast<std::size_t>(i)]);
    const Value r = c.call(a[3], {&arg, 1});
    if (!r.is_list()) c.fail(EvalError::Invalid);
    out.insert(out.end(), r.as_list().begin(), r.as_list().end());
    c.check_len(out.size());
  }
  return Value::list(std::move(out));
}

std::vector<PrimitiveSpec> build_registry() {
  return {
      {"Add", F({I(), I()}, I()), add},
      {"Subtract", F({I(), I()}, I()), subtract},
      {"Multiply", F({I(), I()}, I()), multiply},
      {"Divide", F({I(), I()}, I()), divide},
      {"Min", F({I(), I()}, I()), min2},
      {"Max", F({I(), I()}, I()), max2},
      {"IsEven", F({I()}, B()), is_even},
      {"IsOdd", F({I()}, B()), is_odd},
      {"IsPositive", F({I()}, B()), is_positive},
      {"Greater", F({I(), I()}, B()), greater},
      {"If", F({B(), I(), I()}, I()), if_},
      {"Head", F({L()}, I()), head},
      {"Last", F({L()}, I()), last},
      {"Length", F({L()}, I()), length},
      {"Sum", F({L()}, I()), sum},
      {"Minimum", F({L()}, I()), minimum},
      {"Maximum", F({L()}, I()), maximum},
      {"Access", F({I(), L()}, I()), access},
      {"Reverse", F({L()}, L()), reverse},
      {"Sort", F({L()}, L()), sort},
      {"Take", F({I(), L()}, L()), take},
      {"Drop", F({I(), L()}, L()), drop},
      {"Append", F({L(), I()}, L()), append},
      {"Concat", F({L(), L()}, L()), concat},
      {"Range", F({I()}, L()), range},
      {"Map", F({F({I()}, I()), L()}, L()), map},
      {"Filter", F({F({I()}, B()), L()}, L()), filter},
      {"Count", F({F({I()}, B()), L()}, I()), count},
      {"ZipWith", F({F({I(), I()}, I()), L(), L()}, L()), zip_with},
      {"Scanl1", F({F({I(), I()}, I()), L()}, L()), scanl1},
      // Toy loop language.
      {"Double", F({I()}, I()), double_},
      {"If", F({B(), I()}, L()), keep_if},
      {"Loop", F({L(), I(), I(), F({I()}, L())}, L()), loop},
      {"Len", F({L()}, I()), length},
  };
}

}  // namespace

const std::vector<PrimitiveSpec>& primitive_registry() {
  static const std::vector<PrimitiveSpec> registry = build_registry();
  return registry;
}

const PrimitiveSpec* find_primitive(const std::string& name, const Ty& signature) {
  for (const auto& p : primitive_registry())
    if (p.name == name && p.signature == signature) return &p;
  return nullptr;
}

bool is_primitive_name(const std::string& name) {
  const auto& r = primitive_registry();
  return std::any_of(r.begin(), r.end(), [&](const PrimitiveSpec& p) { return p.name == name; });
}

}  // namespace abeam
