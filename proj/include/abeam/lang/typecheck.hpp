#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "abeam/lang/term.hpp"
#include "abeam/lang/type.hpp"

namespace abeam {

/// Type error at a node. `path` lists child indices from the root
/// (Apply: 0 = function, i = i-th argument; Lam: 0 = body).
class TypeError : public std::runtime_error {
 public:
  TypeError(const std::string& msg, std::vector<int> path);
  const std::vector<int>& path() const { return path_; }

 private:
  std::vector<int> path_;
};

using TypeMap = std::unordered_map<std::string, Ty>;

struct TypeContext {
  const TypeMap* inputs = nullptr;
  const TypeMap* symbols = nullptr;
  /// Types of variables bound outside the root; back() is $0.
  std::vector<Ty> outer;
  /// Hole types. Unknown holes checked against an expected type are recorded.
  std::map<int, Ty>* holes = nullptr;
  /// When set, receives the type of every node in preorder
  /// (node, then Apply fn + args or Lam body).
  std::vector<Ty>* node_types = nullptr;
};

/// Infers the unique type of `t`. Lambda parameter types are taken from
/// the expected arrow type when the lambda is an argument, otherwise from
/// the first use of each parameter in a position of known type.
Ty infer_type(const Term& t, const TypeContext& ctx);

Ty infer_type(const Term& t, const TypeMap& inputs, const TypeMap& symbols);

/// Checks `t` against `expected`; throws TypeError on mismatch.
void check_type(const Term& t, const Ty& expected, const TypeContext& ctx);

}  // namespace abeam
