#include "abeam/synth/store.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "abeam/guidance/features.hpp"

namespace abeam {

namespace {

constexpr std::size_t kIntPool = 20;
constexpr std::size_t kListPool = 8;
constexpr std::size_t kMaxTuples = 24;

void hash_mix(std::size_t& h, std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); }

TermPtr literal(const Value& v) {
  if (v.is_int()) return Term::const_int(v.as_int());
  if (v.is_bool()) return Term::const_bool(v.as_bool());
  return Term::const_list(v.as_list());
}

Signature make_signature(int context, std::vector<Value> cells, const std::vector<EvalError>& errors,
                         const TermPtr& term) {
  Signature s;
  s.context = context;
  s.cells = std::move(cells);
  if (std::any_of(errors.begin(), errors.end(), [](EvalError e) { return e != EvalError::None; })) {
    s.errors = errors;
    for (std::size_t i = 0; i < s.cells.size(); ++i)
      if (s.errors[i] != EvalError::None) s.cells[i] = Value();
    s.syntax = print_term(term);
  }
  return s;
}

}  // namespace

std::size_t Signature::hash() const {
  std::size_t h = std::hash<int>()(context);
  for (const Value& v : cells) hash_mix(h, v.hash());
  for (EvalError e : errors) hash_mix(h, static_cast<std::size_t>(e));
  if (!syntax.empty()) hash_mix(h, std::hash<std::string>()(syntax));
  return h;
}

bool operator==(const Signature& a, const Signature& b) {
  return a.context == b.context && a.errors == b.errors && a.syntax == b.syntax && a.cells == b.cells;
}

std::vector<std::vector<Ty>> param_contexts(const Library& lib) {
  std::vector<std::vector<Ty>> out{{}};
  for (const auto& op : lib.operations())
    for (const Ty& p : op->signature.params())
      if (p.kind() == TyKind::Arrow) {
        std::vector<Ty> ps(p.params().begin(), p.params().end());
        if (std::find(out.begin(), out.end(), ps) == out.end()) out.push_back(std::move(ps));
      }
  return out;
}

std::vector<std::vector<Value>> make_battery(const Task& task, const std::vector<Ty>& params) {
  if (params.empty()) return {{}};
  // Ints: a fixed seeded core plus the integers the examples mention.
  std::vector<std::int64_t> ints{0, 1, -1, 2};
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<std::int64_t> d(-8, 12);
  while (ints.size() < 12) {
    const std::int64_t x = d(rng);
    if (std::find(ints.begin(), ints.end(), x) == ints.end()) ints.push_back(x);
  }
  auto add_int = [&](std::int64_t x) {
    if (ints.size() < kIntPool && std::find(ints.begin(), ints.end(), x) == ints.end()) ints.push_back(x);
  };
  std::vector<IntList> lists{{}, {3, -1, 4, 1, 5}, {2, 7, 1, 8}, {0, 0, 6}};
  auto add_list = [&](const IntList& l) {
    if (lists.size() < kListPool && std::find(lists.begin(), lists.end(), l) == lists.end()) lists.push_back(l);
  };
  for (const Example& ex : task.examples) {
    for (const Value& v : ex.inputs->values) {
      if (v.is_int()) add_int(v.as_int());
      if (v.is_list()) {
        add_list(v.as_list());
        for (std::int64_t x : v.as_list()) add_int(x);
      }
    }
    if (ex.output.is_int()) add_int(ex.output.as_int());
  }

  std::vector<std::vector<Value>> pools;
  for (const Ty& p : params) {
    std::vector<Value> pool;
    switch (p.kind()) {
      case TyKind::Int:
        for (std::int64_t x : ints) pool.push_back(Value::integer(x));
        break;
      case TyKind::Bool:
        pool = {Value::boolean(false), Value::boolean(true)};
        break;
      case TyKind::IntList:
        for (const IntList& l : lists) pool.push_back(Value::list(l));
        break;
      case TyKind::Arrow:
        throw std::invalid_argument("higher-order lambda parameters are not supported");
    }
    pools.push_back(std::move(pool));
  }

  std::size_t total = 1;
  for (const auto& pool : pools) total = std::min<std::size_t>(total * pool.size(), 1u << 20);
  std::vector<std::size_t> picks;
  if (params.size() == 1 || total <= kMaxTuples) {
    for (std::size_t i = 0; i < total; ++i) picks.push_back(i);
  } else {
    std::mt19937_64 prng(0xba77e5 + params.size());
    std::uniform_int_distribution<std::size_t> pick(0, total - 1);
    std::set<std::size_t> seen;
    while (picks.size() < kMaxTuples) {
      const std::size_t i = pick(prng);
      if (seen.insert(i).second) picks.push_back(i);
    }
  }
  std::vector<std::vector<Value>> battery;
  for (std::size_t code : picks) {
    std::vector<Value> tuple(params.size());
    for (std::size_t i = params.size(); i-- > 0;) {
      tuple[i] = pools[i][code % pools[i].size()];
      code /= pools[i].size();
    }
    battery.push_back(std::move(tuple));
  }
  return battery;
}

ValueStore::ValueStore(const Task& task, const Library& lib, const EvalLimits& limits)
    : task_(&task), lib_(&lib), limits_(limits) {
  for (auto& ps : param_contexts(lib)) {
    ParamContext c;
    c.battery = make_battery(task, ps);
    c.params = std::move(ps);
    contexts_.push_back(std::move(c));
  }
  typed_.resize(contexts_.size());
  for (const Example& ex : task.examples) outputs_.push_back(ex.output);
}

int ValueStore::context_of(const std::vector<Ty>& params) const {
  for (std::size_t i = 0; i < contexts_.size(); ++i)
    if (contexts_[i].params == params) return static_cast<int>(i);
  return -1;
}

std::size_t ValueStore::points(int context) const {
  return task_->examples.size() * (context == 0 ? 1 : contexts_[context].battery.size());
}

std::size_t ValueStore::concrete_size() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const ValueEntry& e) { return !e.open() && !e.is_lambda(); }));
}

const std::vector<int>& ValueStore::typed(int context, const Ty& type) const {
  static const std::vector<int> empty;
  const auto& m = typed_[context];
  auto it = m.find(type);
  return it == m.end() ? empty : it->second;
}

const ValueEntry* ValueStore::find(const Signature& sig) const {
  auto it = by_sig_.find(sig);
  return it == by_sig_.end() ? nullptr : &entries_[it->second];
}

void ValueStore::index(const ValueEntry& e) { typed_[e.context][e.type].push_back(e.id); }

bool ValueStore::matches_outputs(const ValueEntry& e) const {
  return e.context == 0 && !e.is_lambda() && e.type == task_->output_type && e.values == outputs_;
}

InsertOutcome ValueStore::insert(ValueEntry e, int* id) {
  e.signature = make_signature(e.context, e.values, e.errors, e.term);
  if (e.errors.size() && !e.signature.has_errors()) e.errors.clear();
  auto it = by_sig_.find(e.signature);
  if (it != by_sig_.end()) {
    ValueEntry& old = entries_[it->second];
    if (id) *id = old.id;
    if (e.weight >= old.weight) return InsertOutcome::Duplicate;
    old.term = e.term;
    old.weight = e.weight;
    old.op = e.op;
    old.args = std::move(e.args);
    old.features = value_features(old, *task_);
    if (old.link >= 0) {
      ValueEntry& lam = entries_[old.link];
      lam.term = Term::lam(static_cast<int>(contexts_[old.context].params.size()), old.term);
      lam.weight = old.weight;
      for (std::size_t i = 0; i < lam.values.size(); ++i)
        lam.values[i] = Value::closure(std::make_shared<const Closure>(Closure{lam.term, nullptr, task_->examples[i].inputs}));
      lam.features = value_features(lam, *task_);
    }
    ++generation_;
    return InsertOutcome::Relaxed;
  }
  e.id = static_cast<int>(entries_.size());
  e.features = value_features(e, *task_);
  if (id) *id = e.id;
  by_sig_.emplace(e.signature, e.id);
  index(e);
  const bool open_body = e.open() && e.weight >= 1;
  if (solution_ < 0 && matches_outputs(e)) solution_ = e.id;
  entries_.push_back(std::move(e));
  if (open_body) add_lambda_view(entries_.back().id);
  ++generation_;
  return InsertOutcome::Inserted;
}

void ValueStore::add_lambda_view(int open_id) {
  const ValueEntry& body = entries_[open_id];
  const ParamContext& ctx = contexts_[body.context];
  ValueEntry lam;
  lam.id = static_cast<int>(entries_.size());
  lam.kind = EntryKind::Lambda;
  lam.context = 0;
  lam.lambda_context = body.context;
  lam.term = Term::lam(static_cast<int>(ctx.params.size()), body.term);
  lam.weight = body.weight;
  lam.type = Ty::arrow(ctx.params, body.type);
  lam.link = open_id;
  Signature sig = body.signature;
  sig.context = -body.context;
  if (sig.has_errors()) sig.syntax = print_term(lam.term);
  lam.signature = std::move(sig);
  for (const Example& ex : task_->examples)
    lam.values.push_back(Value::closure(std::make_shared<const Closure>(Closure{lam.term, nullptr, ex.inputs})));
  lam.features = value_features(lam, *task_);
  entries_[open_id].link = lam.id;
  by_sig_.emplace(lam.signature, lam.id);
  index(lam);
  entries_.push_back(std::move(lam));
}

InsertOutcome ValueStore::apply(int op_index, std::span<const int> args, int context, std::int64_t* steps,
                                int* id) {
  const Operation& op = *lib_->operations()[op_index];
  const std::size_t n = points(context);
  const std::size_t per_example = context == 0 ? 1 : contexts_[context].battery.size();
  ValueEntry e;
  e.context = context;
  e.kind = EntryKind::Apply;
  e.type = op.signature.ret();
  e.op = op_index;
  e.args.assign(args.begin(), args.end());
  e.values.resize(n);
  if (context > 0) e.errors.assign(n, EvalError::None);

  std::vector<Value> argv(args.size());
  std::size_t failures = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t ex = p / per_example;
    EvalError inherited = EvalError::None;
    for (std::size_t i = 0; i < args.size(); ++i) {
      const ValueEntry& a = entries_[args[i]];
      if (a.open()) {
        if (!a.errors.empty() && a.errors[p] != EvalError::None) inherited = a.errors[p];
        argv[i] = a.values[p];
      } else {
        argv[i] = a.values[ex];
      }
    }
    EvalResult r;
    if (inherited != EvalError::None) {
      r.error = inherited;
    } else {
      std::int64_t s = 0;
      r = execute_op(op.entry, argv, *lib_, limits_, &s);
      if (steps) *steps += s;
    }
    if (!r.ok()) {
      if (context == 0) return InsertOutcome::Rejected;
      e.errors[p] = r.error;
      ++failures;
    } else {
      e.values[p] = std::move(r.value);
    }
  }
  if (context > 0 && failures == n) return InsertOutcome::Rejected;

  std::vector<TermPtr> terms;
  terms.reserve(args.size());
  int weight = 1;
  for (int a : args) {
    terms.push_back(entries_[a].term);
    weight += entries_[a].weight;
  }
  e.term = Term::call(op.name, std::move(terms));
  e.weight = weight;
  return insert(std::move(e), id);
}

ValueStore init_store(const Task& task, const Library& lib, const EvalLimits& limits) {
  ValueStore store(task, lib, limits);
  for (std::size_t i = 0; i < task.input_names.size(); ++i) {
    ValueEntry e;
    e.kind = EntryKind::Input;
    e.term = Term::input_var(task.input_names[i]);
    e.weight = 1;
    e.type = task.input_types[i];
    for (const Example& ex : task.examples) e.values.push_back(ex.inputs->values[i]);
    store.insert(std::move(e));
  }
  for (const auto& c : lib.constants()) {
    if (c->type.kind() == TyKind::Arrow) continue;
    ValueEntry e;
    e.kind = EntryKind::Constant;
    e.term = c->reference();
    e.weight = 1;
    e.type = c->type;
    bool ok = true;
    for (const Example& ex : task.examples) {
      EvalResult r = evaluate(e.term, ex.inputs, lib, limits);
      if (!r.ok()) {
        ok = false;
        break;
      }
      e.values.push_back(r.value);
    }
    if (ok) store.insert(std::move(e));
  }
  for (std::size_t c = 1; c < store.contexts().size(); ++c) {
    const ParamContext& ctx = store.contexts()[c];
    const int k = static_cast<int>(ctx.params.size());
    for (int i = 0; i < k; ++i) {
      ValueEntry e;
      e.kind = EntryKind::Param;
      e.context = static_cast<int>(c);
      e.term = Term::bound_var(k - 1 - i);
      e.weight = 0;
      e.type = ctx.params[i];
      for (std::size_t x = 0; x < task.examples.size(); ++x)
        for (const auto& tuple : ctx.battery) e.values.push_back(tuple[i]);
      store.insert(std::move(e));
    }
  }
  return store;
}

Signature compute_signature(const TermPtr& term, const Task& task, const Library& lib, const EvalLimits& limits) {
  const Ty type = infer_type(*term, task.input_type_map(), lib.symbol_types());
  std::vector<Value> cells;
  std::vector<EvalError> errors;
  auto record = [&](EvalResult r) {
    errors.push_back(r.error);
    cells.push_back(r.ok() ? std::move(r.value) : Value());
  };
  int context = 0;
  if (type.kind() == TyKind::Arrow) {
    std::vector<Ty> params(type.params().begin(), type.params().end());
    const auto all = param_contexts(lib);
    auto it = std::find(all.begin(), all.end(), params);
    context = -static_cast<int>(it - all.begin());
    const auto battery = make_battery(task, params);
    for (const Example& ex : task.examples)
      for (const auto& tuple : battery) {
        std::vector<TermPtr> args;
        for (const Value& v : tuple) args.push_back(literal(v));
        record(evaluate(Term::apply(term, std::move(args)), ex.inputs, lib, limits));
      }
  } else {
    for (const Example& ex : task.examples) record(evaluate(term, ex.inputs, lib, limits));
  }
  return make_signature(context, std::move(cells), errors, term);
}

}  // namespace abeam
