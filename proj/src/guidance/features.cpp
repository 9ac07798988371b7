#include "abeam/guidance/features.hpp"

#include <algorithm>
#include <cstdlib>

#include "abeam/synth/store.hpp"

namespace abeam {

std::vector<float> value_features(const ValueEntry& e, const Task& task) {
  std::vector<float> f(kValueFeatureCount, 0.0f);
  f[kBias] = 1.0f;
  f[kWeight] = static_cast<float>(e.weight) / 15.0f;
  f[kUnitWeight] = e.weight == 1 ? 1.0f : 0.0f;
  f[kIsInput] = e.kind == EntryKind::Input ? 1.0f : 0.0f;
  f[kIsConstant] = e.kind == EntryKind::Constant ? 1.0f : 0.0f;
  f[kIsLambda] = e.is_lambda() ? 1.0f : 0.0f;
  const Ty& t = e.type.kind() == TyKind::Arrow ? e.type.ret() : e.type;
  f[kTypeInt] = t.kind() == TyKind::Int;
  f[kTypeBool] = t.kind() == TyKind::Bool;
  f[kTypeList] = t.kind() == TyKind::IntList;

  if (e.is_lambda()) {
    const auto& errs = e.signature.errors;
    if (!errs.empty())
      f[kErrorRate] = static_cast<float>(std::count_if(errs.begin(), errs.end(),
                                                       [](EvalError x) { return x != EvalError::None; })) /
                      static_cast<float>(errs.size());
    return f;
  }
  if (e.open() || task.examples.empty() || e.values.size() != task.examples.size()) return f;

  const float n = static_cast<float>(task.examples.size());
  bool small = t.kind() == TyKind::Int;
  for (std::size_t i = 0; i < task.examples.size(); ++i) {
    const Value& v = e.values[i];
    const Value& out = task.examples[i].output;
    if (v == out) f[kEqualsOutput] += 1.0f / n;
    if (v.is_int()) {
      small = small && std::llabs(v.as_int()) <= 2;
      if (out.is_list()) {
        const IntList& o = out.as_list();
        if (static_cast<std::int64_t>(o.size()) == v.as_int()) f[kLengthMatch] += 1.0f / n;
        if (std::find(o.begin(), o.end(), v.as_int()) != o.end()) f[kInOutput] += 1.0f / n;
      }
    } else if (v.is_list()) {
      const IntList& l = v.as_list();
      if (out.is_list()) {
        const IntList& o = out.as_list();
        if (l.size() == o.size()) f[kLengthMatch] += 1.0f / n;
        bool all = std::all_of(o.begin(), o.end(),
                               [&](std::int64_t x) { return std::find(l.begin(), l.end(), x) != l.end(); });
        if (all) f[kCoversOutput] += 1.0f / n;
      } else if (out.is_int()) {
        if (std::find(l.begin(), l.end(), out.as_int()) != l.end()) f[kHasOutput] += 1.0f / n;
        if (static_cast<std::int64_t>(l.size()) == out.as_int()) f[kLengthMatch] += 1.0f / n;
      }
    }
  }
  f[kSmallInt] = small ? 1.0f : 0.0f;
  return f;
}

}  // namespace abeam
