#include "abeam/lang/sexpr.hpp"

#include <cctype>

namespace abeam {
namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", pos_);
    if (c == '(') {
      ++pos_;
      SExpr e;
      e.list = true;
      e.offset = start;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unterminated '('", start);
        if (text_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (c == '[') {
      const std::size_t close = text_.find(']', pos_);
      if (close == std::string_view::npos) throw ParseError("unterminated '['", start);
      SExpr e;
      e.atom = std::string(text_.substr(pos_, close - pos_ + 1));
      e.offset = start;
      pos_ = close + 1;
      return e;
    }
    if (c == ']') throw ParseError("unexpected ']'", pos_);
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != '[' && text_[pos_] != ']')
      ++pos_;
    SExpr e;
    e.atom = std::string(text_.substr(start, pos_ - start));
    e.offset = start;
    return e;
  }

  void expect_end() {
    skip_space();
    if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

SExpr read_sexpr(std::string_view text) {
  Reader r(text);
  SExpr e = r.read();
  r.expect_end();
  return e;
}

}  // namespace abeam
