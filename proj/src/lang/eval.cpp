#include "abeam/lang/eval.hpp"

#include <limits>
#include <vector>

namespace abeam {
namespace {

struct EvalAbort {
  EvalError error;
};

}  // namespace

const char* to_string(EvalError e) {
  switch (e) {
    case EvalError::None: return "ok";
    case EvalError::StepLimit: return "step-limit";
    case EvalError::ValueBound: return "value-bound";
    case EvalError::Domain: return "domain";
    case EvalError::Invalid: return "invalid";
  }
  return "?";
}

void CallContext::tick(std::int64_t n) {
  steps_ += n;
  if (steps_ > limits_.max_steps) throw EvalAbort{EvalError::StepLimit};
}

std::int64_t CallContext::checked_int(std::int64_t v) const {
  if (v > limits_.max_int_magnitude || v < -limits_.max_int_magnitude)
    throw EvalAbort{EvalError::ValueBound};
  return v;
}

std::int64_t CallContext::checked_int(__int128 v) const {
  if (v > limits_.max_int_magnitude || v < -static_cast<__int128>(limits_.max_int_magnitude))
    throw EvalAbort{EvalError::ValueBound};
  return static_cast<std::int64_t>(v);
}

void CallContext::check_len(std::size_t n) const {
  if (n > limits_.max_list_len) throw EvalAbort{EvalError::ValueBound};
}

void CallContext::fail(EvalError e) const { throw EvalAbort{e}; }

Value CallContext::call(const Value& fn, std::span<const Value> args) {
  if (!fn.is_closure()) fail(EvalError::Invalid);
  const Closure& c = fn.as_closure();
  if (static_cast<std::size_t>(c.lam->arity()) != args.size()) fail(EvalError::Invalid);
  EnvPtr env = c.env;
  for (const Value& a : args) env = std::make_shared<const Frame>(Frame{a, std::move(env)});
  return eval(c.lam->body(), env, c.inputs);
}

Value CallContext::call_op(const OpEntry& op, std::span<const Value> args) {
  if (static_cast<std::size_t>(op.arity) != args.size()) fail(EvalError::Invalid);
  if (op.primitive) return op.primitive(args, *this);
  if (!op.body || op.body->kind() != TermKind::Lam) fail(EvalError::Invalid);
  tick();
  Value fn = Value::closure(std::make_shared<const Closure>(Closure{op.body, nullptr, nullptr}));
  return call(fn, args);
}

Value CallContext::eval(const TermPtr& tp, const EnvPtr& env, const InputBindingPtr& inputs) {
  tick();
  const Term& t = *tp;
  switch (t.kind()) {
    case TermKind::BoundVar: {
      const Frame* f = env.get();
      for (int i = 0; i < t.index() && f; ++i) f = f->next.get();
      if (!f) fail(EvalError::Invalid);
      return f->value;
    }
    case TermKind::InputVar: {
      const Value* v = inputs ? inputs->find(t.name()) : nullptr;
      if (!v) fail(EvalError::Invalid);
      return *v;
    }
    case TermKind::ConstInt: return Value::integer(t.int_value());
    case TermKind::ConstBool: return Value::boolean(t.bool_value());
    case TermKind::ConstList: return Value::list(t.list_value());
    case TermKind::PrimRef: {
      const OpEntry* op = ops_.find_op(t.name());
      if (!op || op->arity != 0 || !op->body) fail(EvalError::Invalid);
      return eval(op->body, nullptr, nullptr);
    }
    case TermKind::Lam:
      return Value::closure(std::make_shared<const Closure>(
          Closure{tp, env, inputs}));
    case TermKind::Apply: {
      auto args = t.args();
      std::vector<Value> vals;
      vals.reserve(args.size());
      if (t.is_prim_call()) {
        const OpEntry* op = ops_.find_op(t.fn()->name());
        if (!op) fail(EvalError::Invalid);
        for (const auto& a : args) vals.push_back(eval(a, env, inputs));
        return call_op(*op, vals);
      }
      Value fn = eval(t.fn(), env, inputs);
      for (const auto& a : args) vals.push_back(eval(a, env, inputs));
      return call(fn, vals);
    }
    case TermKind::Hole: break;
  }
  fail(EvalError::Invalid);
}

EvalResult evaluate(const TermPtr& t, const InputBinding& inputs, const OpTable& ops,
                    const EvalLimits& limits, std::int64_t* steps) {
  return evaluate(t, std::make_shared<const InputBinding>(inputs), ops, limits, steps);
}

EvalResult evaluate(const TermPtr& t, const InputBindingPtr& inputs, const OpTable& ops,
                    const EvalLimits& limits, std::int64_t* steps) {
  CallContext ctx(ops, limits);
  EvalResult r;
  try {
    r.value = ctx.eval(t, nullptr, inputs);
  } catch (const EvalAbort& a) {
    r.error = a.error;
  }
  if (steps) *steps = ctx.steps();
  return r;
}

EvalResult execute_op(const OpEntry& op, std::span<const Value> args, const OpTable& ops,
                      const EvalLimits& limits, std::int64_t* steps) {
  CallContext ctx(ops, limits);
  EvalResult r;
  try {
    r.value = ctx.call_op(op, args);
  } catch (const EvalAbort& a) {
    r.error = a.error;
  }
  if (steps) *steps = ctx.steps();
  return r;
}

}  // namespace abeam
