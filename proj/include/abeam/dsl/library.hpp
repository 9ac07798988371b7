#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "abeam/dsl/abstraction.hpp"
#include "abeam/lang/eval.hpp"
#include "abeam/lang/syntax.hpp"
#include "abeam/lang/typecheck.hpp"

namespace abeam {

enum class OpOrigin : unsigned char { Primitive, Learned };

struct Operation {
  std::string name;
  Ty signature;  // always an arrow
  OpOrigin origin = OpOrigin::Primitive;
  int iteration_found = -1;
  OpEntry entry;

  int arity() const { return entry.arity; }
  bool learned() const { return origin == OpOrigin::Learned; }
  const TermPtr& body() const { return entry.body; }
};

/// A literal constant, or a named zero-parameter abstraction whose value is
/// its body.
struct Constant {
  std::string name;  // empty for literals
  TermPtr term;      // literal, or the body of a named constant
  Ty type;
  int iteration_found = -1;
  OpEntry entry;     // arity 0; used for named constants

  bool named() const { return !name.empty(); }
  /// The term that stands for this constant inside programs.
  TermPtr reference() const { return named() ? Term::prim(name) : term; }
};

class LibraryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The evolving language: operations plus constants. Immutable; extending
/// yields a new value that shares unchanged parts.
class Library final : public OpTable {
 public:
  Library() = default;

  const std::string& name() const { return name_; }
  int version() const { return version_; }
  int next_abstraction_id() const { return next_id_; }

  std::span<const std::shared_ptr<const Operation>> operations() const { return ops_; }
  std::span<const std::shared_ptr<const Constant>> constants() const { return constants_; }

  const Operation* find(const std::string& name) const;
  const Constant* find_constant(const std::string& name) const;
  const OpEntry* find_op(const std::string& name) const override;

  /// Number of learned operations plus named constants.
  int abstraction_count() const;

  /// Names usable in PrimRef position with their types.
  const TypeMap& symbol_types() const { return symbol_types_; }
  /// Parser symbols for this library plus the given input names.
  SymbolTable symbols(std::span<const std::string> inputs = {}) const;

  // Construction helpers; these do not bump the version.
  void set_name(std::string n) { name_ = std::move(n); }
  void set_version(int v) { version_ = v; }
  void set_next_abstraction_id(int k) { next_id_ = k; }
  void add_operation(Operation op);
  void add_constant(Constant c);

 private:
  std::string name_ = "custom";
  int version_ = 0;
  int next_id_ = 1;
  std::vector<std::shared_ptr<const Operation>> ops_;
  std::vector<std::shared_ptr<const Constant>> constants_;
  std::unordered_map<std::string, const OpEntry*> entries_;
  TypeMap symbol_types_;
};

Operation make_primitive(const std::string& name, const Ty& signature);
Constant make_literal(TermPtr literal);

/// DeepCoder-style integer-list DSL: 30 operations (25 first-order, 5
/// higher-order) and constants {0, 1, 2, -1, true, false, []}.
Library default_list_dsl();

/// The nine-symbol loop language: IsEven, Double, If, Loop, Len and
/// constants 0..3.
Library toy_loop_dsl();

/// Library restricted to the named operations (constants kept).
Library restrict_library(const Library& lib, std::span<const std::string> op_names);

/// Adds `a` as a learned operation (or a named constant when arity is 0).
/// Throws LibraryError on name collision or when the body does not check
/// against the abstraction's signature.
Library extend_with_abstraction(const Library& lib, const Abstraction& a);

/// Empty when the library is well formed.
std::vector<std::string> validate_library(const Library& lib);

std::string save_library(const Library& lib);
void save_library(const Library& lib, const std::filesystem::path& file);
/// Throws LibraryError naming the offending primitive or line.
Library load_library(const std::string& text);
Library load_library_file(const std::filesystem::path& file);

/// Same operations, constants and bodies (names, types, printed bodies).
bool libraries_equal(const Library& a, const Library& b);

}  // namespace abeam
