#pragma once

#include <string>
#include <string_view>
#include <unordered_set>

#include "abeam/lang/sexpr.hpp"
#include "abeam/lang/term.hpp"

namespace abeam {

/// Names a parser may resolve: operations/named constants and input
/// variables. Anything else is an UnknownSymbolError.
struct SymbolTable {
  std::unordered_set<std::string> operations;
  std::unordered_set<std::string> inputs;
  /// Accept `??k` holes (librarian patterns).
  bool allow_holes = false;
  /// Allow free de Bruijn indices below this many enclosing binders.
  int outer_binders = 0;
};

/// Parses the program text format:
///   `$i` bound variable, `??k` hole, integers, `true`/`false`, `[1,2,3]`,
///   `(lam body)` / `(lamK body)`, `(f a1 ... an)` application, bare symbols.
TermPtr parse_term(std::string_view text, const SymbolTable& symbols);

std::string print_term(const Term& t);
inline std::string print_term(const TermPtr& t) { return print_term(*t); }

/// Parses `[1,2,3]` or `[1 2 3]`.
IntList parse_int_list(std::string_view text, std::size_t offset = 0);
std::string print_int_list(const IntList& v);

}  // namespace abeam
