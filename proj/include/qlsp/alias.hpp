// Alias analysis over linear qubit references k*i + b.
//
// Two instances can touch the same qubit either within one iteration
// (in-loop) or across iterations at some distance delta >= 1 (across-loop).
// The across-loop solver works over Z via the linear congruence
// k2*delta == b1 - b2 (mod k1 - k2) and minimizes delta subject to the
// iteration window; everything is exact integer arithmetic.
#pragma once

#include <optional>

#include "qlsp/expr.hpp"

namespace qlsp {

// Does some iteration i in T satisfy a(i) == b(i)?
bool in_loop_alias(const Lin& a, const Lin& b, const IterRange& T);

// Smallest delta >= 1 such that a(i) == b(i + delta) for some i with both
// i and i + delta in T ("b's instance delta iterations later touches a's
// qubit"). Equal constant refs (k1 == k2 == 0, b1 == b2) report delta = 1.
std::optional<i64> across_loop_alias(const Lin& a, const Lin& b,
                                     const IterRange& T);

// Inclusive value range of a linear form over a known iteration range.
std::pair<i64, i64> lin_bounds(const Lin& l, i64 lo, i64 hi);

// Resource interaction of two instruction instances co-scheduled in the
// same modulo slot at stages pa and pb, over the steady-state window of T.
enum class PairConflict {
  None,        // never the same qubit in the window
  Persistent,  // same qubit at every window iteration (equal nonzero slope)
  False,       // collides now, but stage shifts change the intercept gap
  True,        // collides and no stage shift can ever fix it
};

PairConflict shifted_conflict(const Lin& a, i64 pa, const Lin& b, i64 pb,
                              const IterRange& T);

}  // namespace qlsp
