#include "qlsp/looptx.hpp"

#include <algorithm>
#include <optional>

#include "qlsp/alias.hpp"
#include "qlsp/compact.hpp"

namespace qlsp {

Instr instr_at(const Instr& in, i64 iteration) {
  return instr_scaled(in, 0, iteration);
}

namespace {

// Does instruction y at iteration i merge with / cancel instruction x at
// iteration i+1? (Same-qubit one-qubit merges and identical-CZ
// cancellations one iteration apart; these are what rotation can realize.)
bool distance_one_pair(const Instr& y, const Instr& x) {
  if (y.cz != x.cz) return false;
  if (!y.cz) {
    if (y.a.array != x.a.array || y.a.idx.k != x.a.idx.k) return false;
    i64 k = x.a.idx.k;
    if (k == 0) return y.a.idx.b == x.a.idx.b;
    return y.a.idx.b == x.a.idx.b + k;
  }
  // CZ: unordered operand pairs must coincide after shifting x by one.
  auto eq = [](const Ref& p, const Ref& q, i64 shift) {
    return p.array == q.array && p.idx.k == q.idx.k &&
           p.idx.b == q.idx.b + q.idx.k * shift;
  };
  return (eq(y.a, x.a, 1) && eq(y.b, x.b, 1)) ||
         (eq(y.a, x.b, 1) && eq(y.b, x.a, 1));
}

bool ref_blocks(const Instr& before, const Ref& r, const IterRange& T) {
  for (const Ref& rb : instr_refs(before))
    if (rb.array == r.array && in_loop_alias(rb.idx, r.idx, T)) return true;
  return false;
}

// A one-qubit gate is movable to the loop front if nothing before it can
// touch its qubit; a CZ only needs to get past one-qubit gates (CZs
// commute among themselves). A CZ blocked by exactly one one-qubit gate
// sitting on a loop-invariant operand moves together with that gate.
struct Movable {
  int x;
  std::optional<int> companion;  // one-qubit gate rotated with a CZ
};

std::optional<Movable> movable(const Body& body, int x, const IterRange& T) {
  const Instr& X = body[x];
  if (!X.cz) {
    for (int j = 0; j < x; ++j)
      if (ref_blocks(body[j], X.a, T)) return std::nullopt;
    return Movable{x, std::nullopt};
  }
  std::vector<int> sq_blockers;
  for (int j = 0; j < x; ++j) {
    if (body[j].cz) continue;
    if (ref_blocks(body[j], X.a, T) || ref_blocks(body[j], X.b, T))
      sq_blockers.push_back(j);
  }
  if (sq_blockers.empty()) return Movable{x, std::nullopt};
  if (sq_blockers.size() != 1) return std::nullopt;
  int s = sq_blockers[0];
  const Instr& S = body[s];
  // The companion must itself be movable and sit on a loop-invariant
  // operand of the CZ (otherwise peeling the pair would not commute).
  const Ref* inv = nullptr;
  if (X.a.idx.k == 0 && ref_blocks(S, X.a, T) && !ref_blocks(S, X.b, T))
    inv = &X.a;
  else if (X.b.idx.k == 0 && ref_blocks(S, X.b, T) && !ref_blocks(S, X.a, T))
    inv = &X.b;
  if (!inv) return std::nullopt;
  for (int j = 0; j < s; ++j)
    if (ref_blocks(body[j], S.a, T)) return std::nullopt;
  return Movable{x, s};
}

}  // namespace

Rotated rotate(LoopProgram& p, Body body, IterRange range) {
  Rotated out;
  body = compact_left_fix(p, std::move(body), range);

  // Epilogue entries remember the loop end value they were peeled at,
  // relative to the original end; converted to final-end offsets below.
  std::vector<std::pair<Instr, i64>> epi;  // (body-space instr, end delta)
  i64 end_delta = 0;                       // how much the end has shrunk
  size_t cap = body.size() * body.size() + 4;

  for (size_t step = 0; step < cap; ++step) {
    if (range.known && range.trips() < 1) break;

    int pick = -1;
    std::optional<int> companion;
    for (int x = 0; x < (int)body.size() && pick < 0; ++x) {
      if (body[x].mark) continue;
      bool is_dst = false;
      for (int y = 0; y < (int)body.size() && !is_dst; ++y)
        is_dst = distance_one_pair(body[y], body[x]);
      if (!is_dst) continue;
      if (auto mv = movable(body, x, range)) {
        pick = x;
        companion = mv->companion;
      }
    }
    if (pick < 0) break;

    std::vector<int> moved;
    if (companion) moved.push_back(*companion);
    moved.push_back(pick);

    // Peel the moved instructions at the loop start...
    for (int idx : moved) {
      EdgeInstr e;
      e.in = body[idx];
      e.in.mark = false;
      e.anchor = Anchor::Start;
      e.off = 0;
      out.prologue.push_back(std::move(e));
    }
    // ...queue everything else at the current loop end...
    std::vector<std::pair<Instr, i64>> peeled;
    for (int i = 0; i < (int)body.size(); ++i) {
      if (i == pick || (companion && i == *companion)) continue;
      peeled.push_back({body[i], end_delta});
    }
    epi.insert(epi.begin(), peeled.begin(), peeled.end());
    // ...and advance the moved instructions to the next iteration.
    Body next;
    for (int i = 0; i < (int)body.size(); ++i)
      if (i != pick && !(companion && i == *companion)) next.push_back(body[i]);
    for (int idx : moved) {
      Instr shifted = instr_shifted(body[idx], 1);
      shifted.mark = true;
      next.push_back(std::move(shifted));
    }
    body = std::move(next);
    end_delta += 1;
    if (range.known) range.hi -= 1;
    out.steps += 1;
    body = compact_left_fix(p, std::move(body), range);
  }

  for (auto& [in, delta] : epi) {
    EdgeInstr e;
    e.in = in;
    e.in.mark = false;
    e.anchor = Anchor::End;
    e.off = end_delta - delta;  // iterations past the final end (>= 1)
    out.epilogue.push_back(std::move(e));
  }
  for (Instr& in : body) in.mark = false;
  out.body = std::move(body);
  out.range = range;
  return out;
}

Unrolled unroll(const LoopProgram& p, const Body& body, const IterRange& range,
                i64 C) {
  (void)p;
  Unrolled out;
  out.C = C;

  auto make_case = [&](i64 q) {
    UnrollCase uc;
    uc.q = q;
    for (i64 c = 0; c < C; ++c)
      for (const Instr& in : body)
        uc.body.push_back(instr_scaled(in, C, q + c));
    return uc;
  };

  if (range.known) {
    i64 q = euc_mod(range.lo, C);
    UnrollCase uc = make_case(q);
    i64 trips = range.empty() ? 0 : range.trips();
    i64 full = trips / C;
    uc.jstart = euc_div(range.lo, C);
    uc.jrange = full > 0 ? IterRange::of(uc.jstart, uc.jstart + full - 1)
                         : IterRange::of(uc.jstart, uc.jstart - 1);
    for (i64 i = range.lo + full * C; i <= range.hi; ++i)
      for (const Instr& in : body) uc.remainder.push_back(instr_at(in, i));
    out.cases.push_back(std::move(uc));
  } else {
    for (i64 q = 0; q < C; ++q) {
      UnrollCase uc = make_case(q);
      uc.jrange = IterRange::all();
      out.cases.push_back(std::move(uc));
    }
  }
  return out;
}

}  // namespace qlsp
