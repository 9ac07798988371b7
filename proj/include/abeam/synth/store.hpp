#pragma once

#include <unordered_map>
#include <vector>

#include "abeam/dsl/library.hpp"
#include "abeam/synth/task.hpp"

namespace abeam {

/// Observational identity of a value. Concrete values (context 0) hold one
/// cell per example. Open values (context c > 0, bodies over that context's
/// lambda parameters) and lambdas (context -c) hold one cell per
/// (example, battery tuple) point. When any cell errors the printed term is
/// appended, so such values dedupe syntactically.
struct Signature {
  int context = 0;
  std::vector<Value> cells;
  std::vector<EvalError> errors;  // empty, or one per cell
  std::string syntax;

  bool has_errors() const { return !syntax.empty(); }
  std::size_t hash() const;
  friend bool operator==(const Signature& a, const Signature& b);
};

struct SignatureHash {
  std::size_t operator()(const Signature& s) const { return s.hash(); }
};

/// A lambda-parameter list together with the fixed argument battery used to
/// observe function values. Context 0 has no parameters.
struct ParamContext {
  std::vector<Ty> params;
  /// tuple[i] binds parameter i; the last parameter is $0.
  std::vector<std::vector<Value>> battery;
};

enum class EntryKind : unsigned char { Input, Constant, Param, Apply, Lambda };

struct ValueEntry {
  int id = -1;
  TermPtr term;
  int weight = 0;
  Ty type;
  int context = 0;  // 0 for concrete values and lambdas
  EntryKind kind = EntryKind::Apply;
  Signature signature;
  /// Concrete: one per example. Open: one per grid point. Lambda: one
  /// closure per example.
  std::vector<Value> values;
  std::vector<EvalError> errors;  // open entries only; empty when clean
  int lambda_context = 0;         // lambdas: the context of the body
  int link = -1;                  // open entry <-> its lambda view
  int op = -1;                    // provenance: library operation index
  std::vector<int> args;          // provenance: argument entry ids
  std::vector<float> features;

  bool is_lambda() const { return kind == EntryKind::Lambda; }
  bool open() const { return context > 0; }
};

enum class InsertOutcome : unsigned char { Inserted, Duplicate, Relaxed, Rejected };

/// Explored values of one search, deduplicated by signature. Holds pointers
/// to the task and library, which must outlive it.
class ValueStore {
 public:
  ValueStore(const Task& task, const Library& lib, const EvalLimits& limits);

  const Task& task() const { return *task_; }
  const Library& library() const { return *lib_; }
  const EvalLimits& limits() const { return limits_; }

  const std::vector<ParamContext>& contexts() const { return contexts_; }
  /// Context index for a parameter list, or -1.
  int context_of(const std::vector<Ty>& params) const;
  /// Evaluation points of a context: examples, or examples x battery.
  std::size_t points(int context) const;
  std::size_t battery_size(int context) const { return contexts_[context].battery.size(); }

  std::size_t size() const { return entries_.size(); }
  /// Entries that are neither open nor lambdas.
  std::size_t concrete_size() const;
  const ValueEntry& entry(int id) const { return entries_[id]; }
  const std::vector<ValueEntry>& entries() const { return entries_; }

  /// Entries of `type` usable in `context`, in insertion order. Arrow types
  /// list lambdas; context c > 0 lists its own open entries (not the
  /// concrete ones).
  const std::vector<int>& typed(int context, const Ty& type) const;
  const ValueEntry* find(const Signature& sig) const;

  /// Builds the signature, values and term of op(args) in `context` and
  /// inserts it. Rejected when a concrete value errors anywhere or an open
  /// value errors everywhere.
  InsertOutcome apply(int op_index, std::span<const int> args, int context, std::int64_t* steps,
                      int* id = nullptr);

  /// Inserts a prepared entry (term, weight, type, context, kind, values,
  /// errors set). Relaxes the weight of an existing duplicate.
  InsertOutcome insert(ValueEntry e, int* id = nullptr);

  /// Does any concrete entry reproduce every output? Returns its id.
  int solution() const { return solution_; }

  /// Bumps whenever an entry is added or relaxed.
  std::uint64_t generation() const { return generation_; }

 private:
  void add_lambda_view(int open_id);
  void index(const ValueEntry& e);
  bool matches_outputs(const ValueEntry& e) const;

  const Task* task_;
  const Library* lib_;
  EvalLimits limits_;
  std::vector<ParamContext> contexts_;
  std::vector<ValueEntry> entries_;
  std::unordered_map<Signature, int, SignatureHash> by_sig_;
  std::vector<std::unordered_map<Ty, std::vector<int>, TyHash>> typed_;
  std::vector<Value> outputs_;
  int solution_ = -1;
  std::uint64_t generation_ = 0;
};

/// Lambda-parameter lists required by the library's higher-order parameters,
/// in first-appearance order, preceded by the empty context.
std::vector<std::vector<Ty>> param_contexts(const Library& lib);

/// The deterministic argument battery for a parameter list under a task.
std::vector<std::vector<Value>> make_battery(const Task& task, const std::vector<Ty>& params);

/// Inputs, constants, and one parameter seed per lambda-context parameter.
ValueStore init_store(const Task& task, const Library& lib, const EvalLimits& limits = {});

/// Signature of a closed term: per-example results, or for a lambda the
/// battery fingerprint. Errors are folded in.
Signature compute_signature(const TermPtr& term, const Task& task, const Library& lib,
                            const EvalLimits& limits = {});

}  // namespace abeam
