#include "abeam/lang/syntax.hpp"

#include <charconv>
#include <cctype>

namespace abeam {
namespace {

bool parse_int(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

// `lam` -> 1, `lamK` -> K, anything else -> 0.
int lam_arity(const std::string& head) {
  if (head.rfind("lam", 0) != 0) return 0;
  if (head.size() == 3) return 1;
  std::int64_t k = 0;
  if (!parse_int(std::string_view(head).substr(3), k) || k < 1 || k > 16) return 0;
  return static_cast<int>(k);
}

class TermBuilder {
 public:
  explicit TermBuilder(const SymbolTable& s) : symbols_(s) {}

  TermPtr build(const SExpr& e, int depth) {
    if (e.is_atom()) return atom(e, depth);
    if (e.items.empty()) throw ParseError("empty application", e.offset);
    const SExpr& head = e.items.front();
    if (head.is_atom()) {
      if (int k = lam_arity(head.atom); k > 0) {
        if (e.items.size() != 2) throw ParseError("lambda takes exactly one body", e.offset);
        return Term::lam(k, build(e.items[1], depth + k));
      }
    }
    if (e.items.size() < 2) throw ParseError("application needs at least one argument", e.offset);
    TermPtr fn = build(head, depth);
    std::vector<TermPtr> args;
    args.reserve(e.items.size() - 1);
    for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(build(e.items[i], depth));
    return Term::apply(std::move(fn), std::move(args));
  }

 private:
  TermPtr atom(const SExpr& e, int depth) {
    const std::string& a = e.atom;
    if (a.front() == '[') return Term::const_list(parse_int_list(a, e.offset));
    std::int64_t v = 0;
    if (parse_int(a, v)) return Term::const_int(v);
    if (a == "true") return Term::const_bool(true);
    if (a == "false") return Term::const_bool(false);
    if (a.front() == '$') {
      if (!parse_int(std::string_view(a).substr(1), v) || v < 0)
        throw ParseError("bad variable '" + a + "'", e.offset);
      if (v >= depth + symbols_.outer_binders)
        throw ParseError("unbound index " + a, e.offset);
      return Term::bound_var(static_cast<int>(v));
    }
    if (a.rfind("??", 0) == 0) {
      if (!symbols_.allow_holes) throw ParseError("holes are not allowed here", e.offset);
      std::int64_t id = 0;
      if (a.size() > 2 && (!parse_int(std::string_view(a).substr(2), id) || id < 0))
        throw ParseError("bad hole '" + a + "'", e.offset);
      return Term::hole(static_cast<int>(id));
    }
    if (lam_arity(a) > 0) throw ParseError("'" + a + "' must head a list", e.offset);
    if (symbols_.operations.count(a)) return Term::prim(a);
    if (symbols_.inputs.count(a)) return Term::input_var(a);
    throw UnknownSymbolError(a, e.offset);
  }

  const SymbolTable& symbols_;
};

void print_into(const Term& t, std::string& out) {
  switch (t.kind()) {
    case TermKind::BoundVar:
      out += '$';
      out += std::to_string(t.index());
      return;
    case TermKind::Hole:
      out += "??";
      out += std::to_string(t.index());
      return;
    case TermKind::InputVar:
    case TermKind::PrimRef:
      out += t.name();
      return;
    case TermKind::ConstInt:
      out += std::to_string(t.int_value());
      return;
    case TermKind::ConstBool:
      out += t.bool_value() ? "true" : "false";
      return;
    case TermKind::ConstList:
      out += print_int_list(*t.list_value());
      return;
    case TermKind::Lam:
      out += t.arity() == 1 ? "(lam " : "(lam" + std::to_string(t.arity()) + " ";
      print_into(*t.body(), out);
      out += ')';
      return;
    case TermKind::Apply:
      out += '(';
      print_into(*t.fn(), out);
      for (const auto& a : t.args()) {
        out += ' ';
        print_into(*a, out);
      }
      out += ')';
      return;
  }
}

}  // namespace

IntList parse_int_list(std::string_view text, std::size_t offset) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    throw ParseError("malformed list literal", offset);
  IntList out;
  std::size_t i = 1;
  const std::size_t end = text.size() - 1;
  while (i < end) {
    while (i < end && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',')) ++i;
    if (i >= end) break;
    std::size_t j = i;
    while (j < end && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != ',') ++j;
    std::int64_t v = 0;
    if (!parse_int(text.substr(i, j - i), v))
      throw ParseError("bad list element '" + std::string(text.substr(i, j - i)) + "'", offset + i);
    out.push_back(v);
    i = j;
  }
  return out;
}

std::string print_int_list(const IntList& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  out += ']';
  return out;
}

TermPtr parse_term(std::string_view text, const SymbolTable& symbols) {
  return TermBuilder(symbols).build(read_sexpr(text), 0);
}

std::string print_term(const Term& t) {
  std::string out;
  print_into(t, out);
  return out;
}

}  // namespace abeam
