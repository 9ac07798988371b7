#pragma once

#include <string>
#include <vector>

#include "abeam/lang/eval.hpp"
#include "abeam/lang/type.hpp"

namespace abeam {

struct PrimitiveSpec {
  std::string name;
  Ty signature;
  PrimitiveFn fn;
};

/// Every built-in primitive, keyed by (name, signature). The list DSL and
/// the toy loop DSL share IsEven; the toy `If` has its own signature.
const std::vector<PrimitiveSpec>& primitive_registry();

/// nullptr when no primitive has that name and signature.
const PrimitiveSpec* find_primitive(const std::string& name, const Ty& signature);
bool is_primitive_name(const std::string& name);

}  // namespace abeam
