#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abeam {

/// Syntax error carrying the byte offset into the parsed text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// A symbol that did not resolve against the supplied symbol table.
class UnknownSymbolError : public ParseError {
 public:
  UnknownSymbolError(const std::string& token, std::size_t offset)
      : ParseError("unknown symbol '" + token + "'", offset), token_(token) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

/// Untyped S-expression. Bracketed list literals such as `[1,2,3]` are
/// returned as single atoms including the brackets.
struct SExpr {
  std::string atom;
  std::vector<SExpr> items;
  std::size_t offset = 0;
  bool list = false;

  bool is_atom() const { return !list; }
};

/// Reads exactly one S-expression; trailing non-space input is an error.
SExpr read_sexpr(std::string_view text);

}  // namespace abeam
