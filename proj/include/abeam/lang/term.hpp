#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace abeam {

using IntList = std::vector<std::int64_t>;
using IntListPtr = std::shared_ptr<const IntList>;

enum class TermKind : unsigned char {
  BoundVar,   // de Bruijn index
  InputVar,   // task input by name
  ConstInt,
  ConstBool,
  ConstList,
  PrimRef,    // operation or named constant
  Apply,
  Lam,        // binds `arity` variables at once; $0 is the last one
  Hole,       // abstraction placeholder, only produced by the librarian
};

class Term;
using TermPtr = std::shared_ptr<const Term>;

/// Immutable lambda-calculus term. Structural hash is computed once at
/// construction.
class Term {
 public:
  static TermPtr bound_var(int index);
  static TermPtr input_var(std::string name);
  static TermPtr const_int(std::int64_t v);
  static TermPtr const_bool(bool v);
  static TermPtr const_list(IntList v);
  static TermPtr prim(std::string name);
  static TermPtr apply(TermPtr fn, std::vector<TermPtr> args);
  /// Shorthand for apply(prim(op), args).
  static TermPtr call(std::string op, std::vector<TermPtr> args);
  static TermPtr lam(int arity, TermPtr body);
  static TermPtr hole(int id);

  TermKind kind() const { return kind_; }
  /// De Bruijn index, hole id or lambda arity depending on kind.
  int index() const { return static_cast<int>(int_); }
  int arity() const { return static_cast<int>(int_); }
  std::int64_t int_value() const { return int_; }
  bool bool_value() const { return int_ != 0; }
  const IntListPtr& list_value() const { return list_; }
  const std::string& name() const { return name_; }

  /// Apply: children()[0] is the function, the rest are arguments.
  /// Lam: children()[0] is the body.
  std::span<const TermPtr> children() const { return children_; }
  const TermPtr& fn() const { return children_.front(); }
  std::span<const TermPtr> args() const { return std::span<const TermPtr>(children_).subspan(1); }
  const TermPtr& body() const { return children_.front(); }

  /// True for an Apply whose function is a PrimRef.
  bool is_prim_call() const { return kind_ == TermKind::Apply && children_[0]->kind_ == TermKind::PrimRef; }

  std::size_t hash() const { return hash_; }

 private:
  Term(TermKind k) : kind_(k) {}
  void finish();

  TermKind kind_;
  std::int64_t int_ = 0;
  IntListPtr list_;
  std::string name_;
  std::vector<TermPtr> children_;
  std::size_t hash_ = 0;
};

bool structurally_equal(const Term& a, const Term& b);
inline bool structurally_equal(const TermPtr& a, const TermPtr& b) {
  return a == b || structurally_equal(*a, *b);
}

struct TermPtrHash {
  std::size_t operator()(const TermPtr& t) const { return t->hash(); }
};
struct TermPtrEq {
  bool operator()(const TermPtr& a, const TermPtr& b) const { return structurally_equal(a, b); }
};

/// Smallest free de Bruijn index in `t` relative to its root, or nullopt
/// when the term is closed.
std::optional<int> min_free_index(const Term& t);
/// Largest free index, or nullopt when closed.
std::optional<int> max_free_index(const Term& t);
/// True when every BoundVar is below the number of binders enclosing it
/// (plus `outer` binders assumed around the root).
bool is_closed(const Term& t, int outer = 0);

/// Adds `delta` to every free index >= `cutoff`. Throws std::logic_error when
/// a free index would go negative.
TermPtr shift(const TermPtr& t, int delta, int cutoff = 0);

/// Program weight: an application of a primitive is 1 plus its arguments,
/// inputs and constants are 1, a lambda weighs its body, bound variables
/// and holes weigh 0.
int term_size(const Term& t);
inline int term_size(const TermPtr& t) { return term_size(*t); }

/// Total node count, including Lam and BoundVar nodes.
std::size_t count_nodes(const Term& t);

bool contains_prim(const Term& t, const std::string& name);

}  // namespace abeam
