// Integer expressions: linear forms k*var+b used throughout the loop
// analyses, plus general expression trees for the emitted explicitly
// parallel language (which needs +,-,*,/,% over the loop counter and the
// symbolic range bounds).
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

namespace qlsp {

using i64 = long long;

// Euclidean division: remainder has the divisor's sign (so euc_mod(-1, 2)
// is 1, euc_mod(1, -2) is -1) and euc_div(a,b)*b + euc_mod(a,b) == a.
i64 euc_div(i64 a, i64 b);
i64 euc_mod(i64 a, i64 b);

// k*i + b over one implicit integer variable.
struct Lin {
  i64 k = 0;
  i64 b = 0;

  i64 at(i64 i) const { return k * i + b; }
  // Composition with i -> i + d (the same reference seen d iterations later).
  Lin shifted(i64 d) const { return {k, b + k * d}; }
  // Composition with i -> s*i + d (loop unrolling substitution).
  Lin scaled(i64 s, i64 d) const { return {k * s, k * d + b}; }
  bool operator==(const Lin&) const = default;
  auto operator<=>(const Lin&) const = default;
};

// Iteration space of a loop variable. Unknown ranges behave as all of Z for
// the analyses; lo/hi are only meaningful when known is true.
struct IterRange {
  bool known = true;
  i64 lo = 0;
  i64 hi = -1;

  static IterRange all() { return {false, 0, 0}; }
  static IterRange of(i64 lo, i64 hi) { return {true, lo, hi}; }
  bool contains(i64 i) const { return !known || (lo <= i && i <= hi); }
  bool empty() const { return known && lo > hi; }
  i64 trips() const { return hi - lo + 1; }  // known only
  bool operator==(const IterRange&) const = default;
};

// --- Expression trees for emitted programs ------------------------------
//
// Immutable nodes behind shared_ptr so statements can be copied freely.
// The builder functions fold constants and drop identity operands; the
// parser uses the same builders, so printing and reparsing yield equal
// trees.

enum class ExOp { Num, Var, Add, Sub, Mul, Div, Mod };

struct ExNode;
using Ex = std::shared_ptr<const ExNode>;

struct ExNode {
  ExOp op;
  i64 num = 0;       // Num
  std::string var;   // Var
  Ex l, r;           // binary ops
};

Ex ex_num(i64 v);
Ex ex_var(const std::string& name);
Ex ex_add(Ex a, Ex b);
Ex ex_sub(Ex a, Ex b);
Ex ex_mul(Ex a, Ex b);
Ex ex_div(Ex a, Ex b);  // Euclidean
Ex ex_mod(Ex a, Ex b);  // Euclidean
// k*var + b in canonical shape (omits zero/unit parts).
Ex ex_lin(i64 k, const std::string& var, i64 b);

bool ex_equal(const Ex& a, const Ex& b);
// Evaluate with the given variable bindings; throws std::runtime_error on an
// unbound variable or division by zero.
i64 ex_eval(const Ex& e, const std::map<std::string, i64>& env);
std::string ex_print(const Ex& e);

}  // namespace qlsp
