#include "abeam/lang/value.hpp"

#include <charconv>
#include <stdexcept>

#include "abeam/lang/sexpr.hpp"
#include "abeam/lang/syntax.hpp"

namespace abeam {

std::size_t Value::hash() const {
  std::size_t h = v_.index() * 0x9e3779b97f4a7c15ULL;
  if (is_int()) return h ^ (static_cast<std::size_t>(as_int()) * 0xff51afd7ed558ccdULL);
  if (is_bool()) return h ^ (as_bool() ? 0x1234567ULL : 0x7654321ULL);
  if (is_list()) {
    for (auto x : as_list()) h = (h ^ static_cast<std::size_t>(x)) * 0x100000001b3ULL;
    return h ^ as_list().size();
  }
  return h ^ std::hash<const void*>{}(std::get<ClosurePtr>(v_).get());
}

std::string Value::str() const {
  if (is_int()) return std::to_string(as_int());
  if (is_bool()) return as_bool() ? "true" : "false";
  if (is_list()) return print_int_list(as_list());
  return "<closure " + print_term(*as_closure().lam) + ">";
}

bool operator==(const Value& a, const Value& b) {
  if (a.v_.index() != b.v_.index()) return false;
  if (a.is_int()) return a.as_int() == b.as_int();
  if (a.is_bool()) return a.as_bool() == b.as_bool();
  if (a.is_list()) return a.list_ptr() == b.list_ptr() || a.as_list() == b.as_list();
  return std::get<ClosurePtr>(a.v_) == std::get<ClosurePtr>(b.v_);
}

const Value* InputBinding::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return &values[i];
  return nullptr;
}

Value parse_value(const std::string& text) {
  std::size_t b = text.find_first_not_of(" \t");
  std::size_t e = text.find_last_not_of(" \t");
  if (b == std::string::npos) throw ParseError("empty value", 0);
  std::string_view s(text.data() + b, e - b + 1);
  if (s == "true") return Value::boolean(true);
  if (s == "false") return Value::boolean(false);
  if (s.front() == '[') return Value::list(parse_int_list(s, b));
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("bad value '" + std::string(s) + "'", b);
  return Value::integer(v);
}

}  // namespace abeam
