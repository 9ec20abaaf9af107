#include "qlsp/alias.hpp"

#include <algorithm>
#include <numeric>

namespace qlsp {

namespace {

// Extended gcd: returns g = gcd(a,b) and x,y with a*x + b*y == g.
i64 ext_gcd(i64 a, i64 b, i64& x, i64& y) {
  if (b == 0) {
    x = a >= 0 ? 1 : -1;
    y = 0;
    return a >= 0 ? a : -a;
  }
  i64 x1, y1;
  i64 g = ext_gcd(b, euc_mod(a, b), x1, y1);
  x = y1;
  y = x1 - euc_div(a, b) * y1;
  return g;
}

// Smallest x >= 1 with a*x == c (mod m), m >= 1; nullopt if unsolvable.
std::optional<i64> min_pos_congruence(i64 a, i64 c, i64 m) {
  a = euc_mod(a, m);
  c = euc_mod(c, m);
  if (a == 0) {
    if (c != 0) return std::nullopt;
    return 1;  // every x solves it
  }
  i64 x, y;
  i64 g = ext_gcd(a, m, x, y);
  if (c % g != 0) return std::nullopt;
  i64 mg = m / g;
  i64 x0 = euc_mod(x * (c / g), mg);
  return x0 == 0 ? mg : x0;
}

}  // namespace

bool in_loop_alias(const Lin& a, const Lin& b, const IterRange& T) {
  if (T.empty()) return false;
  i64 dk = a.k - b.k;
  i64 db = b.b - a.b;
  if (dk == 0) return db == 0;
  if (db % dk != 0) return false;
  return T.contains(db / dk);
}

std::optional<i64> across_loop_alias(const Lin& a, const Lin& b,
                                     const IterRange& T) {
  if (T.empty()) return std::nullopt;
  // a(i) == b(i + d): (a.k - b.k) * i == b.k * d + b.b - a.b.
  if (a.k == b.k) {
    if (a.k == 0) {
      if (a.b != b.b) return std::nullopt;
      if (T.known && T.trips() < 2) return std::nullopt;
      return 1;
    }
    i64 num = a.b - b.b;
    if (num % a.k != 0) return std::nullopt;
    i64 d = num / a.k;
    if (d < 1) return std::nullopt;
    if (T.known && d > T.hi - T.lo) return std::nullopt;
    return d;
  }
  i64 dk = a.k - b.k;
  i64 m = dk >= 0 ? dk : -dk;
  // Need dk | (b.k * d + b.b - a.b); step between consecutive solutions d.
  auto first = min_pos_congruence(b.k, a.b - b.b, m);
  if (!first) return std::nullopt;
  i64 g = std::gcd(euc_mod(b.k, m) == 0 ? m : euc_mod(b.k, m), m);
  i64 step = m / g;
  if (!T.known) return *first;
  for (i64 d = *first; d <= T.hi - T.lo; d += step) {
    i64 i = (b.k * d + b.b - a.b) / dk;
    if (i >= T.lo && i + d <= T.hi) return d;
  }
  return std::nullopt;
}

std::pair<i64, i64> lin_bounds(const Lin& l, i64 lo, i64 hi) {
  i64 v1 = l.at(lo), v2 = l.at(hi);
  return {std::min(v1, v2), std::max(v1, v2)};
}

PairConflict shifted_conflict(const Lin& a, i64 pa, const Lin& b, i64 pb,
                              const IterRange& T) {
  Lin as = a.shifted(-pa);
  Lin bs = b.shifted(-pb);
  IterRange W = T;
  if (T.known) {
    W.lo = T.lo + std::max(pa, pb);
    W.hi = T.hi + std::min(pa, pb);
    if (W.lo > W.hi) return PairConflict::None;
  }
  if (!in_loop_alias(as, bs, W)) return PairConflict::None;
  if (a.k == b.k) {
    if (a.k == 0) return PairConflict::True;
    if (as.b == bs.b) return PairConflict::Persistent;
    return PairConflict::False;
  }
  i64 dk = b.k - a.k;
  return b.k % dk == 0 ? PairConflict::True : PairConflict::False;
}

}  // namespace qlsp
