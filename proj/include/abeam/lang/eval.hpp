#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "abeam/lang/term.hpp"
#include "abeam/lang/value.hpp"

namespace abeam {

enum class EvalError : unsigned char {
  None,
  StepLimit,   // maxSteps exhausted
  ValueBound,  // integer magnitude or list length over the limit
  Domain,      // e.g. head of empty list, division by zero
  Invalid,     // unknown operation, arity or kind mismatch (ill-typed input)
};

const char* to_string(EvalError e);

struct EvalLimits {
  std::int64_t max_steps = 10'000;
  std::int64_t max_int_magnitude = 2'147'483'647;
  std::size_t max_list_len = 1'024;
};

struct EvalResult {
  Value value;
  EvalError error = EvalError::None;

  bool ok() const { return error == EvalError::None; }
};

class CallContext;
using PrimitiveFn = Value (*)(std::span<const Value> args, CallContext& ctx);

/// What the evaluator needs to know about a name in PrimRef position.
struct OpEntry {
  int arity = 0;
  PrimitiveFn primitive = nullptr;
  /// Learned operation: closed Lam of `arity` parameters.
  /// Named constant (arity 0): closed concrete term.
  TermPtr body;
};

class OpTable {
 public:
  virtual ~OpTable() = default;
  virtual const OpEntry* find_op(const std::string& name) const = 0;
};

/// Evaluation state shared by the interpreter and primitive implementations.
/// Failures unwind to the public entry points and become EvalResult errors.
class CallContext {
 public:
  CallContext(const OpTable& ops, const EvalLimits& limits) : ops_(ops), limits_(limits) {}

  void tick(std::int64_t n = 1);
  std::int64_t checked_int(std::int64_t v) const;
  std::int64_t checked_int(__int128 v) const;
  void check_len(std::size_t n) const;
  [[noreturn]] void fail(EvalError e) const;

  /// Calls a closure value with `args`.
  Value call(const Value& fn, std::span<const Value> args);
  Value call_op(const OpEntry& op, std::span<const Value> args);
  Value eval(const TermPtr& t, const EnvPtr& env, const InputBindingPtr& inputs);

  std::int64_t steps() const { return steps_; }
  const EvalLimits& limits() const { return limits_; }

 private:
  const OpTable& ops_;
  EvalLimits limits_;
  std::int64_t steps_ = 0;
};

/// Call-by-value evaluation of a term under the given inputs.
EvalResult evaluate(const TermPtr& t, const InputBindingPtr& inputs, const OpTable& ops,
                    const EvalLimits& limits, std::int64_t* steps = nullptr);
EvalResult evaluate(const TermPtr& t, const InputBinding& inputs, const OpTable& ops,
                    const EvalLimits& limits, std::int64_t* steps = nullptr);

/// Executes one operation on already-evaluated arguments.
EvalResult execute_op(const OpEntry& op, std::span<const Value> args, const OpTable& ops,
                      const EvalLimits& limits, std::int64_t* steps = nullptr);

}  // namespace abeam
