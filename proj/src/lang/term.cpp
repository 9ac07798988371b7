#include "abeam/lang/term.hpp"

#include <algorithm>
#include <stdexcept>

namespace abeam {
namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

void Term::finish() {
  std::size_t h = mix(0xcbf29ce484222325ULL, static_cast<std::size_t>(kind_));
  h = mix(h, static_cast<std::size_t>(int_));
  if (list_) {
    h = mix(h, list_->size());
    for (auto v : *list_) h = mix(h, static_cast<std::size_t>(v));
  }
  if (!name_.empty()) h = mix(h, std::hash<std::string>{}(name_));
  for (const auto& c : children_) h = mix(h, c->hash_);
  hash_ = h;
}

TermPtr Term::bound_var(int index) {
  if (index < 0) throw std::invalid_argument("negative de Bruijn index");
  auto t = std::shared_ptr<Term>(new Term(TermKind::BoundVar));
  t->int_ = index;
  t->finish();
  return t;
}

TermPtr Term::input_var(std::string name) {
  auto t = std::shared_ptr<Term>(new Term(TermKind::InputVar));
  t->name_ = std::move(name);
  t->finish();
  return t;
}

TermPtr Term::const_int(std::int64_t v) {
  auto t = std::shared_ptr<Term>(new Term(TermKind::ConstInt));
  t->int_ = v;
  t->finish();
  return t;
}

TermPtr Term::const_bool(bool v) {
  auto t = std::shared_ptr<Term>(new Term(TermKind::ConstBool));
  t->int_ = v ? 1 : 0;
  t->finish();
  return t;
}

TermPtr Term::const_list(IntList v) {
  auto t = std::shared_ptr<Term>(new Term(TermKind::ConstList));
  t->list_ = std::make_shared<const IntList>(std::move(v));
  t->finish();
  return t;
}

TermPtr Term::prim(std::string name) {
  auto t = std::shared_ptr<Term>(new Term(TermKind::PrimRef));
  t->name_ = std::move(name);
  t->finish();
  return t;
}

TermPtr Term::apply(TermPtr fn, std::vector<TermPtr> args) {
  if (args.empty()) throw std::invalid_argument("application without arguments");
  auto t = std::shared_ptr<Term>(new Term(TermKind::Apply));
  t->children_.reserve(args.size() + 1);
  t->children_.push_back(std::move(fn));
  for (auto& a : args) t->children_.push_back(std::move(a));
  t->finish();
  return t;
}

TermPtr Term::call(std::string op, std::vector<TermPtr> args) {
  return apply(prim(std::move(op)), std::move(args));
}

TermPtr Term::lam(int arity, TermPtr body) {
  if (arity < 1) throw std::invalid_argument("lambda arity must be >= 1");
  auto t = std::shared_ptr<Term>(new Term(TermKind::Lam));
  t->int_ = arity;
  t->children_.push_back(std::move(body));
  t->finish();
  return t;
}

TermPtr Term::hole(int id) {
  if (id < 0) throw std::invalid_argument("negative hole id");
  auto t = std::shared_ptr<Term>(new Term(TermKind::Hole));
  t->int_ = id;
  t->finish();
  return t;
}

bool structurally_equal(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.int_value() != b.int_value()) return false;
  if (a.name() != b.name()) return false;
  if (a.list_value() || b.list_value()) {
    if (!a.list_value() || !b.list_value() || *a.list_value() != *b.list_value()) return false;
  }
  auto ca = a.children();
  auto cb = b.children();
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (!structurally_equal(*ca[i], *cb[i])) return false;
  return true;
}

namespace {

template <typename F>
void for_each_free(const Term& t, int depth, F&& f) {
  switch (t.kind()) {
    case TermKind::BoundVar:
      if (t.index() >= depth) f(t.index() - depth);
      return;
    case TermKind::Lam:
      for_each_free(*t.body(), depth + t.arity(), f);
      return;
    default:
      for (const auto& c : t.children()) for_each_free(*c, depth, f);
  }
}

}  // namespace

std::optional<int> min_free_index(const Term& t) {
  std::optional<int> best;
  for_each_free(t, 0, [&](int i) {
    if (!best || i < *best) best = i;
  });
  return best;
}

std::optional<int> max_free_index(const Term& t) {
  std::optional<int> best;
  for_each_free(t, 0, [&](int i) {
    if (!best || i > *best) best = i;
  });
  return best;
}

bool is_closed(const Term& t, int outer) {
  auto m = max_free_index(t);
  return !m || *m < outer;
}

TermPtr shift(const TermPtr& t, int delta, int cutoff) {
  if (delta == 0) return t;
  switch (t->kind()) {
    case TermKind::BoundVar:
      if (t->index() < cutoff) return t;
      if (t->index() + delta < 0) throw std::logic_error("shift would capture a bound variable");
      return Term::bound_var(t->index() + delta);
    case TermKind::Lam: {
      TermPtr b = shift(t->body(), delta, cutoff + t->arity());
      return b == t->body() ? t : Term::lam(t->arity(), std::move(b));
    }
    case TermKind::Apply: {
      bool changed = false;
      std::vector<TermPtr> kids;
      kids.reserve(t->children().size());
      for (const auto& c : t->children()) {
        kids.push_back(shift(c, delta, cutoff));
        changed |= kids.back() != c;
      }
      if (!changed) return t;
      TermPtr fn = kids.front();
      kids.erase(kids.begin());
      return Term::apply(std::move(fn), std::move(kids));
    }
    default:
      return t;
  }
}

int term_size(const Term& t) {
  switch (t.kind()) {
    case TermKind::BoundVar:
    case TermKind::Hole:
      return 0;
    case TermKind::Lam:
      return term_size(*t.body());
    case TermKind::Apply: {
      int n = t.is_prim_call() ? 1 : term_size(*t.fn());
      for (const auto& a : t.args()) n += term_size(*a);
      return n;
    }
    default:
      return 1;
  }
}

std::size_t count_nodes(const Term& t) {
  std::size_t n = 1;
  for (const auto& c : t.children()) n += count_nodes(*c);
  return n;
}

bool contains_prim(const Term& t, const std::string& name) {
  if (t.kind() == TermKind::PrimRef && t.name() == name) return true;
  return std::any_of(t.children().begin(), t.children().end(),
                     [&](const TermPtr& c) { return contains_prim(*c, name); });
}

}  // namespace abeam
