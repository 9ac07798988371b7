#include "abeam/lang/typecheck.hpp"

#include "abeam/lang/syntax.hpp"

namespace abeam {
namespace {

std::string path_str(const std::vector<int>& path) {
  std::string s = "/";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '/';
    s += std::to_string(path[i]);
  }
  return s;
}

class Checker {
 public:
  explicit Checker(const TypeContext& ctx) : ctx_(ctx) {
    for (const Ty& t : ctx.outer) vars_.emplace_back(t);
  }

  Ty infer(const Term& t) {
    const std::size_t slot = record_slot();
    Ty ty = infer_inner(t);
    record(slot, ty);
    return ty;
  }

  void check(const Term& t, const Ty& expected) {
    const std::size_t slot = record_slot();
    check_inner(t, expected);
    record(slot, expected);
  }

 private:
  Ty infer_inner(const Term& t) {
    switch (t.kind()) {
      case TermKind::BoundVar: {
        auto& slot = var(t.index());
        if (!slot) fail("cannot infer type of $" + std::to_string(t.index()));
        return *slot;
      }
      case TermKind::InputVar: {
        if (ctx_.inputs) {
          auto it = ctx_.inputs->find(t.name());
          if (it != ctx_.inputs->end()) return it->second;
        }
        fail("unknown input variable '" + t.name() + "'");
      }
      case TermKind::ConstInt: return Ty::integer();
      case TermKind::ConstBool: return Ty::boolean();
      case TermKind::ConstList: return Ty::int_list();
      case TermKind::PrimRef: {
        if (ctx_.symbols) {
          auto it = ctx_.symbols->find(t.name());
          if (it != ctx_.symbols->end()) return it->second;
        }
        fail("unknown operation '" + t.name() + "'");
      }
      case TermKind::Hole: {
        if (ctx_.holes) {
          auto it = ctx_.holes->find(t.index());
          if (it != ctx_.holes->end()) return it->second;
        }
        fail("cannot infer type of hole ??" + std::to_string(t.index()));
      }
      case TermKind::Apply: {
        path_.push_back(0);
        Ty fty = infer(*t.fn());
        path_.pop_back();
        if (!fty.is_arrow()) fail("applying a non-function of type " + fty.str());
        auto args = t.args();
        if (args.size() != fty.arity())
          fail("arity mismatch: expected " + std::to_string(fty.arity()) + " arguments, got " +
               std::to_string(args.size()));
        for (std::size_t i = 0; i < args.size(); ++i) {
          path_.push_back(static_cast<int>(i) + 1);
          check(*args[i], fty.params()[i]);
          path_.pop_back();
        }
        return fty.ret();
      }
      case TermKind::Lam: {
        const std::size_t base = vars_.size();
        for (int i = 0; i < t.arity(); ++i) vars_.emplace_back();
        path_.push_back(0);
        Ty body = infer(*t.body());
        path_.pop_back();
        std::vector<Ty> params;
        for (std::size_t i = base; i < vars_.size(); ++i) {
          if (!vars_[i]) fail("cannot infer lambda parameter types");
          params.push_back(*vars_[i]);
        }
        vars_.resize(base);
        return Ty::arrow(std::move(params), std::move(body));
      }
    }
    fail("unreachable");
  }

  void check_inner(const Term& t, const Ty& expected) {
    switch (t.kind()) {
      case TermKind::BoundVar: {
        auto& slot = var(t.index());
        if (!slot) {
          slot = expected;
          return;
        }
        if (!(*slot == expected)) mismatch(expected, *slot);
        return;
      }
      case TermKind::Hole: {
        if (ctx_.holes) {
          auto [it, inserted] = ctx_.holes->try_emplace(t.index(), expected);
          if (!inserted && !(it->second == expected)) mismatch(expected, it->second);
          return;
        }
        fail("hole ??" + std::to_string(t.index()) + " outside a pattern");
      }
      case TermKind::Lam: {
        if (!expected.is_arrow() || expected.arity() != static_cast<std::size_t>(t.arity()))
          fail("lambda of arity " + std::to_string(t.arity()) + " where " + expected.str() +
               " is expected");
        const std::size_t base = vars_.size();
        // params()[0] is the outermost, so it is pushed first and ends up at
        // the highest index.
        for (const Ty& p : expected.params()) vars_.emplace_back(p);
        path_.push_back(0);
        check(*t.body(), expected.ret());
        path_.pop_back();
        vars_.resize(base);
        return;
      }
      default: {
        Ty actual = infer_inner(t);
        if (!(actual == expected)) mismatch(expected, actual);
      }
    }
  }

  std::optional<Ty>& var(int index) {
    if (index < 0 || static_cast<std::size_t>(index) >= vars_.size())
      fail("unbound index $" + std::to_string(index));
    return vars_[vars_.size() - 1 - static_cast<std::size_t>(index)];
  }

  std::size_t record_slot() {
    if (!ctx_.node_types) return 0;
    ctx_.node_types->emplace_back();
    return ctx_.node_types->size() - 1;
  }
  void record(std::size_t slot, const Ty& t) {
    if (ctx_.node_types) (*ctx_.node_types)[slot] = t;
  }

  [[noreturn]] void mismatch(const Ty& expected, const Ty& actual) {
    fail("type mismatch: expected " + expected.str() + ", got " + actual.str());
  }
  [[noreturn]] void fail(const std::string& msg) { throw TypeError(msg, path_); }

  const TypeContext& ctx_;
  std::vector<std::optional<Ty>> vars_;
  std::vector<int> path_;
};

}  // namespace

TypeError::TypeError(const std::string& msg, std::vector<int> path)
    : std::runtime_error(msg + " at " + path_str(path)), path_(std::move(path)) {}

Ty infer_type(const Term& t, const TypeContext& ctx) { return Checker(ctx).infer(t); }

Ty infer_type(const Term& t, const TypeMap& inputs, const TypeMap& symbols) {
  TypeContext ctx;
  ctx.inputs = &inputs;
  ctx.symbols = &symbols;
  return infer_type(t, ctx);
}

void check_type(const Term& t, const Ty& expected, const TypeContext& ctx) {
  Checker(ctx).check(t, expected);
}

}  // namespace abeam
