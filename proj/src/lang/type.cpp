#include "abeam/lang/type.hpp"

#include <stdexcept>

#include "abeam/lang/sexpr.hpp"

namespace abeam {

struct Ty::ArrowData {
  std::vector<Ty> params;
  Ty ret;
};

Ty Ty::arrow(std::vector<Ty> params, Ty ret) {
  if (params.empty()) throw std::invalid_argument("arrow type needs at least one parameter");
  Ty t(TyKind::Arrow);
  t.arrow_ = std::make_shared<const ArrowData>(ArrowData{std::move(params), std::move(ret)});
  return t;
}

std::span<const Ty> Ty::params() const {
  if (!arrow_) return {};
  return arrow_->params;
}

const Ty& Ty::ret() const {
  if (!arrow_) throw std::logic_error("ret() on non-arrow type " + str());
  return arrow_->ret;
}

std::size_t Ty::hash() const {
  std::size_t h = static_cast<std::size_t>(kind_) * 0x9e3779b97f4a7c15ULL;
  if (arrow_) {
    for (const Ty& p : arrow_->params) h = (h ^ p.hash()) * 0x100000001b3ULL;
    h = (h ^ arrow_->ret.hash()) * 0x100000001b3ULL;
  }
  return h;
}

std::string Ty::str() const {
  switch (kind_) {
    case TyKind::Int: return "int";
    case TyKind::Bool: return "bool";
    case TyKind::IntList: return "list";
    case TyKind::Arrow: break;
  }
  std::string out = "(->";
  for (const Ty& p : arrow_->params) out += " " + p.str();
  out += " " + arrow_->ret.str() + ")";
  return out;
}

bool operator==(const Ty& a, const Ty& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ != TyKind::Arrow) return true;
  if (a.arrow_ == b.arrow_) return true;
  return a.arrow_->params == b.arrow_->params && a.arrow_->ret == b.arrow_->ret;
}

namespace {

Ty type_from_sexpr(const SExpr& e) {
  if (e.is_atom()) {
    if (e.atom == "int") return Ty::integer();
    if (e.atom == "bool") return Ty::boolean();
    if (e.atom == "list") return Ty::int_list();
    throw ParseError("unknown type '" + e.atom + "'", e.offset);
  }
  if (e.items.size() < 3 || !e.items[0].is_atom() || e.items[0].atom != "->")
    throw ParseError("arrow type must look like (-> params... ret)", e.offset);
  std::vector<Ty> params;
  for (std::size_t i = 1; i + 1 < e.items.size(); ++i) params.push_back(type_from_sexpr(e.items[i]));
  return Ty::arrow(std::move(params), type_from_sexpr(e.items.back()));
}

}  // namespace

Ty parse_type(std::string_view text) { return type_from_sexpr(read_sexpr(text)); }

}  // namespace abeam
