#pragma once

#include <array>
#include <vector>

namespace abeam {

struct Task;
struct ValueEntry;

/// Per-value features relative to the task's outputs.
enum ValueFeature : int {
  kBias,
  kWeight,        // weight / 15
  kUnitWeight,
  kIsInput,
  kIsConstant,
  kIsLambda,
  kTypeInt,       // lambdas use their return type
  kTypeBool,
  kTypeList,
  kEqualsOutput,  // fraction of examples
  kLengthMatch,   // list: same length as output list; int: equals output length
  kInOutput,      // int contained in the output list
  kHasOutput,     // list contains the output int
  kCoversOutput,  // list contains every output element
  kErrorRate,     // lambdas: fraction of erroring battery points
  kSmallInt,      // |v| <= 2 on every example
  kValueFeatureCount,
};

std::vector<float> value_features(const ValueEntry& e, const Task& task);

}  // namespace abeam
