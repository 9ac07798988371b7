#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "abeam/lang/term.hpp"

namespace abeam {

struct Closure;
using ClosurePtr = std::shared_ptr<const Closure>;

/// Runtime value: integer, boolean, integer list or closure.
class Value {
 public:
  Value() : v_(std::int64_t{0}) {}
  static Value integer(std::int64_t x) { return Value(x); }
  static Value boolean(bool b) { return Value(b); }
  static Value list(IntList xs) { return Value(std::make_shared<const IntList>(std::move(xs))); }
  static Value list(IntListPtr xs) { return Value(std::move(xs)); }
  static Value closure(ClosurePtr c) { return Value(std::move(c)); }

  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_list() const { return std::holds_alternative<IntListPtr>(v_); }
  bool is_closure() const { return std::holds_alternative<ClosurePtr>(v_); }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  const IntList& as_list() const { return *std::get<IntListPtr>(v_); }
  const IntListPtr& list_ptr() const { return std::get<IntListPtr>(v_); }
  const Closure& as_closure() const { return *std::get<ClosurePtr>(v_); }

  std::size_t hash() const;
  /// Literal syntax (`3`, `true`, `[1,2]`); closures print as `<closure ...>`.
  std::string str() const;

  /// Closures compare by identity.
  friend bool operator==(const Value& a, const Value& b);

 private:
  template <typename T>
  explicit Value(T x) : v_(std::move(x)) {}

  std::variant<std::int64_t, bool, IntListPtr, ClosurePtr> v_;
};

/// Persistent de Bruijn environment; the head frame is $0.
struct Frame {
  Value value;
  std::shared_ptr<const Frame> next;
};
using EnvPtr = std::shared_ptr<const Frame>;

/// Input-variable bindings for one example.
struct InputBinding {
  std::vector<std::string> names;
  std::vector<Value> values;

  const Value* find(const std::string& name) const;
};
using InputBindingPtr = std::shared_ptr<const InputBinding>;

struct Closure {
  TermPtr lam;  // a Lam node
  EnvPtr env;
  InputBindingPtr inputs;
};

/// Parses a literal value (`-3`, `true`, `[1,2,3]`).
Value parse_value(const std::string& text);

}  // namespace abeam
