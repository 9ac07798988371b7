#include "abeam/dsl/library.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "abeam/dsl/primitives.hpp"

namespace abeam {

const Operation* Library::find(const std::string& name) const {
  for (const auto& op : ops_)
    if (op->name == name) return op.get();
  return nullptr;
}

const Constant* Library::find_constant(const std::string& name) const {
  for (const auto& c : constants_)
    if (c->named() && c->name == name) return c.get();
  return nullptr;
}

const OpEntry* Library::find_op(const std::string& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : it->second;
}

int Library::abstraction_count() const {
  int n = 0;
  for (const auto& op : ops_) n += op->learned();
  for (const auto& c : constants_) n += c->named();
  return n;
}

SymbolTable Library::symbols(std::span<const std::string> inputs) const {
  SymbolTable s;
  for (const auto& [name, ty] : symbol_types_) s.operations.insert(name);
  s.inputs.insert(inputs.begin(), inputs.end());
  return s;
}

void Library::add_operation(Operation op) {
  auto p = std::make_shared<const Operation>(std::move(op));
  if (entries_.count(p->name)) throw LibraryError("duplicate name '" + p->name + "'");
  entries_[p->name] = &p->entry;
  symbol_types_[p->name] = p->signature;
  ops_.push_back(std::move(p));
}

void Library::add_constant(Constant c) {
  auto p = std::make_shared<const Constant>(std::move(c));
  if (p->named()) {
    if (entries_.count(p->name)) throw LibraryError("duplicate name '" + p->name + "'");
    entries_[p->name] = &p->entry;
    symbol_types_[p->name] = p->type;
  }
  constants_.push_back(std::move(p));
}

Operation make_primitive(const std::string& name, const Ty& signature) {
  const PrimitiveSpec* spec = find_primitive(name, signature);
  if (!spec) {
    if (is_primitive_name(name))
      throw LibraryError("primitive '" + name + "' has no variant of type " + signature.str());
    throw LibraryError("unknown primitive '" + name + "'");
  }
  Operation op;
  op.name = name;
  op.signature = signature;
  op.origin = OpOrigin::Primitive;
  op.entry.arity = static_cast<int>(signature.arity());
  op.entry.primitive = spec->fn;
  return op;
}

Constant make_literal(TermPtr literal) {
  Constant c;
  switch (literal->kind()) {
    case TermKind::ConstInt: c.type = Ty::integer(); break;
    case TermKind::ConstBool: c.type = Ty::boolean(); break;
    case TermKind::ConstList: c.type = Ty::int_list(); break;
    default: throw LibraryError("not a literal: " + print_term(literal));
  }
  c.term = std::move(literal);
  return c;
}

namespace {

Library from_primitives(const std::string& name, std::span<const PrimitiveSpec* const> prims,
                        std::vector<TermPtr> literals) {
  Library lib;
  lib.set_name(name);
  for (const PrimitiveSpec* p : prims) lib.add_operation(make_primitive(p->name, p->signature));
  for (auto& l : literals) lib.add_constant(make_literal(std::move(l)));
  return lib;
}

const PrimitiveSpec* registry_entry(std::size_t i) { return &primitive_registry()[i]; }

}  // namespace

Library default_list_dsl() {
  // The first 30 registry entries form the list DSL.
  std::vector<const PrimitiveSpec*> prims;
  for (std::size_t i = 0; i < 30; ++i) prims.push_back(registry_entry(i));
  return from_primitives("list", prims,
                         {Term::const_int(0), Term::const_int(1), Term::const_int(2),
                          Term::const_int(-1), Term::const_bool(true), Term::const_bool(false),
                          Term::const_list({})});
}

Library toy_loop_dsl() {
  const Ty I = Ty::integer(), B = Ty::boolean(), L = Ty::int_list();
  std::vector<const PrimitiveSpec*> prims = {
      find_primitive("IsEven", Ty::arrow({I}, B)),
      find_primitive("Double", Ty::arrow({I}, I)),
      find_primitive("If", Ty::arrow({B, I}, L)),
      find_primitive("Loop", Ty::arrow({L, I, I, Ty::arrow({I}, L)}, L)),
      find_primitive("Len", Ty::arrow({L}, I)),
  };
  return from_primitives("toy", prims,
                         {Term::const_int(0), Term::const_int(1), Term::const_int(2),
                          Term::const_int(3)});
}

Library restrict_library(const Library& lib, std::span<const std::string> op_names) {
  Library out;
  out.set_name(lib.name());
  out.set_version(lib.version());
  out.set_next_abstraction_id(lib.next_abstraction_id());
  for (const auto& op : lib.operations())
    if (std::find(op_names.begin(), op_names.end(), op->name) != op_names.end())
      out.add_operation(*op);
  for (const auto& c : lib.constants()) out.add_constant(*c);
  return out;
}

Library extend_with_abstraction(const Library& lib, const Abstraction& a) {
  if (lib.find_op(a.name)) throw LibraryError("name collision: '" + a.name + "'");
  if (!a.body) throw LibraryError("abstraction '" + a.name + "' has no body");
  if (!is_closed(*a.body)) throw LibraryError("abstraction body is not closed");
  TypeMap no_inputs;
  TypeContext ctx;
  ctx.inputs = &no_inputs;
  ctx.symbols = &lib.symbol_types();
  try {
    check_type(*a.body, a.signature, ctx);
  } catch (const TypeError& e) {
    throw LibraryError("abstraction '" + a.name + "' fails typecheck: " + e.what());
  }

  Library out = lib;
  if (a.arity == 0) {
    Constant c;
    c.name = a.name;
    c.term = a.body;
    c.type = a.signature;
    c.iteration_found = a.iteration;
    c.entry.arity = 0;
    c.entry.body = a.body;
    out.add_constant(std::move(c));
  } else {
    if (!a.signature.is_arrow() || a.signature.arity() != static_cast<std::size_t>(a.arity) ||
        a.body->kind() != TermKind::Lam || a.body->arity() != a.arity)
      throw LibraryError("abstraction '" + a.name + "' arity does not match its body");
    Operation op;
    op.name = a.name;
    op.signature = a.signature;
    op.origin = OpOrigin::Learned;
    op.iteration_found = a.iteration;
    op.entry.arity = a.arity;
    op.entry.body = a.body;
    out.add_operation(std::move(op));
  }
  out.set_version(lib.version() + 1);
  int k = 0;
  if (a.name.rfind("fn_", 0) == 0) {
    try {
      k = std::stoi(a.name.substr(3));
    } catch (...) {
      k = 0;
    }
  }
  out.set_next_abstraction_id(std::max(lib.next_abstraction_id(), k + 1));
  return out;
}

std::vector<std::string> validate_library(const Library& lib) {
  std::vector<std::string> out;
  std::set<std::string> names;
  TypeMap no_inputs;
  TypeContext ctx;
  ctx.inputs = &no_inputs;
  ctx.symbols = &lib.symbol_types();
  for (const auto& op : lib.operations()) {
    if (!names.insert(op->name).second) out.push_back("duplicate operation name '" + op->name + "'");
    if (!op->signature.is_arrow()) {
      out.push_back("operation '" + op->name + "' has non-arrow signature " + op->signature.str());
      continue;
    }
    if (op->arity() != static_cast<int>(op->signature.arity()))
      out.push_back("operation '" + op->name + "' arity disagrees with its signature");
    if (op->learned()) {
      if (!op->body()) {
        out.push_back("learned operation '" + op->name + "' has no body");
        continue;
      }
      if (!is_closed(*op->body())) out.push_back("body of '" + op->name + "' is not closed");
      try {
        check_type(*op->body(), op->signature, ctx);
      } catch (const TypeError& e) {
        out.push_back("body of '" + op->name + "' fails typecheck: " + e.what());
      }
    } else if (!op->entry.primitive) {
      out.push_back("primitive '" + op->name + "' has no executable semantics");
    }
  }
  std::set<std::string> literals;
  for (const auto& c : lib.constants()) {
    if (!c->term) {
      out.push_back("constant without a term");
      continue;
    }
    if (c->named()) {
      if (!names.insert(c->name).second) out.push_back("duplicate constant name '" + c->name + "'");
      try {
        check_type(*c->term, c->type, ctx);
      } catch (const TypeError& e) {
        out.push_back("named constant '" + c->name + "' fails typecheck: " + e.what());
      }
    } else if (!literals.insert(print_term(c->term) + ":" + c->type.str()).second) {
      out.push_back("duplicate constant " + print_term(c->term));
    }
  }
  return out;
}

// Library text format ----------------------------------------------------------
//
//   abeam-library 1
//   name list
//   version 0
//   next_id 1
//   const <literal> : <type>
//   const <name> @<iteration> : <type> = <body>
//   op <name> : <type> = primitive
//   op <name> @<iteration> : <type> = <body>

std::string save_library(const Library& lib) {
  std::ostringstream out;
  out << "abeam-library 1\n";
  out << "name " << lib.name() << "\n";
  out << "version " << lib.version() << "\n";
  out << "next_id " << lib.next_abstraction_id() << "\n";
  for (const auto& c : lib.constants()) {
    if (c->named())
      out << "const " << c->name << " @" << c->iteration_found << " : " << c->type.str() << " = "
          << print_term(c->term) << "\n";
    else
      out << "const " << print_term(c->term) << " : " << c->type.str() << "\n";
  }
  for (const auto& op : lib.operations()) {
    if (op->learned())
      out << "op " << op->name << " @" << op->iteration_found << " : " << op->signature.str()
          << " = " << print_term(op->body()) << "\n";
    else
      out << "op " << op->name << " : " << op->signature.str() << " = primitive\n";
  }
  return out.str();
}

void save_library(const Library& lib, const std::filesystem::path& file) {
  std::ofstream f(file);
  if (!f) throw LibraryError("cannot write " + file.string());
  f << save_library(lib);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Decl {
  std::string name;
  int iteration = -1;
  bool has_iteration = false;
  std::string type;
  std::string rhs;
};

// Parses `<name> [@iter] : <type> [= <rhs>]`.
Decl parse_decl(const std::string& rest, int line_no) {
  const auto colon = rest.find(" : ");
  if (colon == std::string::npos)
    throw LibraryError("line " + std::to_string(line_no) + ": expected ' : '");
  Decl d;
  std::istringstream head(rest.substr(0, colon));
  head >> d.name;
  std::string iter;
  if (head >> iter) {
    if (iter.size() < 2 || iter[0] != '@')
      throw LibraryError("line " + std::to_string(line_no) + ": bad iteration tag '" + iter + "'");
    d.iteration = std::stoi(iter.substr(1));
    d.has_iteration = true;
  }
  std::string tail = rest.substr(colon + 3);
  const auto eq = tail.find(" = ");
  if (eq == std::string::npos) {
    d.type = trim(tail);
  } else {
    d.type = trim(tail.substr(0, eq));
    d.rhs = trim(tail.substr(eq + 3));
  }
  return d;
}

}  // namespace

Library load_library(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  Library lib;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp + 1));
    const std::string where = "line " + std::to_string(line_no) + ": ";
    try {
      if (!header) {
        if (key != "abeam-library" || rest != "1") throw LibraryError(where + "missing header");
        header = true;
      } else if (key == "name") {
        lib.set_name(rest);
      } else if (key == "version") {
        lib.set_version(std::stoi(rest));
      } else if (key == "next_id") {
        lib.set_next_abstraction_id(std::stoi(rest));
      } else if (key == "const") {
        Decl d = parse_decl(rest, line_no);
        Ty ty = parse_type(d.type);
        if (d.rhs.empty()) {
          Constant c = make_literal(parse_term(d.name, SymbolTable{}));
          if (!(c.type == ty)) throw LibraryError(where + "literal type mismatch");
          lib.add_constant(std::move(c));
        } else {
          Constant c;
          c.name = d.name;
          c.type = ty;
          c.term = parse_term(d.rhs, lib.symbols());
          c.iteration_found = d.iteration;
          c.entry.arity = 0;
          c.entry.body = c.term;
          lib.add_constant(std::move(c));
        }
      } else if (key == "op") {
        Decl d = parse_decl(rest, line_no);
        Ty ty = parse_type(d.type);
        if (!ty.is_arrow()) throw LibraryError(where + "operation type must be an arrow");
        if (d.rhs == "primitive") {
          lib.add_operation(make_primitive(d.name, ty));
        } else {
          Operation op;
          op.name = d.name;
          op.signature = ty;
          op.origin = OpOrigin::Learned;
          op.iteration_found = d.iteration;
          op.entry.arity = static_cast<int>(ty.arity());
          op.entry.body = parse_term(d.rhs, lib.symbols());
          lib.add_operation(std::move(op));
        }
      } else {
        throw LibraryError(where + "unknown key '" + key + "'");
      }
    } catch (const LibraryError& e) {
      const std::string msg = e.what();
      if (msg.rfind("line ", 0) == 0) throw;
      throw LibraryError(where + msg);
    } catch (const std::exception& e) {
      throw LibraryError(where + e.what());
    }
  }
  if (!header) throw LibraryError("empty library file");
  return lib;
}

Library load_library_file(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw LibraryError("cannot read " + file.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return load_library(ss.str());
}

bool libraries_equal(const Library& a, const Library& b) {
  return save_library(a) == save_library(b);
}

}  // namespace abeam
