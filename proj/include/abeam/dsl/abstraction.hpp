#pragma once

#include <set>
#include <string>

#include "abeam/lang/term.hpp"
#include "abeam/lang/type.hpp"

namespace abeam {

/// Compression accounting for one candidate abstraction.
struct UtilityScore {
  int matches = 0;   // de-overlapped rewrite sites
  int body_size = 0; // weight of the non-hole part of the pattern
  int arity = 0;
  int value = 0;     // total weight removed from the corpus by rewriting
};

/// A mined library component with holes turned into parameters. For
/// arity > 0 the body is a closed `(lamK ...)` whose $0 is the last
/// parameter; for arity 0 it is a closed concrete term.
struct Abstraction {
  std::string name;
  int arity = 0;
  TermPtr body;
  /// Arrow type for arity > 0, the value type otherwise.
  Ty signature;
  std::set<std::string> found_in_tasks;
  UtilityScore utility;
  int round = 0;
  int iteration = 0;
};

}  // namespace abeam
