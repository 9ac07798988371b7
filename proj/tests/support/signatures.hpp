#pragma once

#include <set>
#include <string>

#include "abeam/synth/store.hpp"

namespace abeam::testing {

/// Printable key per store entry: context, per-example cells (errors as
/// `!`) and the syntactic fallback.
inline std::set<std::string> signature_set(const ValueStore& s) {
  std::set<std::string> out;
  for (const ValueEntry& e : s.entries()) {
    std::string k = std::to_string(e.signature.context) + "|";
    for (std::size_t i = 0; i < e.signature.cells.size(); ++i)
      k += (e.signature.errors.empty() || e.signature.errors[i] == EvalError::None ? e.signature.cells[i].str()
                                                                                  : std::string("!")) +
           ";";
    out.insert(k + e.signature.syntax);
  }
  return out;
}

}  // namespace abeam::testing
