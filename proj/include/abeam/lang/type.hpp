#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abeam {

enum class TyKind : unsigned char { Int, Bool, IntList, Arrow };

/// Monomorphic type: int, bool, list (of ints) or a multi-parameter arrow.
/// Arrow payloads are shared, so copies are cheap.
class Ty {
 public:
  Ty() = default;  // int

  static Ty integer() { return Ty(TyKind::Int); }
  static Ty boolean() { return Ty(TyKind::Bool); }
  static Ty int_list() { return Ty(TyKind::IntList); }
  /// Throws std::invalid_argument when `params` is empty.
  static Ty arrow(std::vector<Ty> params, Ty ret);

  TyKind kind() const { return kind_; }
  bool is_arrow() const { return kind_ == TyKind::Arrow; }
  std::span<const Ty> params() const;
  const Ty& ret() const;
  std::size_t arity() const { return params().size(); }

  std::size_t hash() const;
  std::string str() const;

  friend bool operator==(const Ty& a, const Ty& b);

 private:
  struct ArrowData;
  explicit Ty(TyKind k) : kind_(k) {}

  TyKind kind_ = TyKind::Int;
  std::shared_ptr<const ArrowData> arrow_;
};

/// Parses `int`, `bool`, `list` or `(-> p1 ... pn ret)`.
Ty parse_type(std::string_view text);

struct TyHash {
  std::size_t operator()(const Ty& t) const { return t.hash(); }
};

}  // namespace abeam
