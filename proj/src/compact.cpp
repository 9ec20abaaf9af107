#include "qlsp/compact.hpp"

#include <algorithm>

#include "qlsp/alias.hpp"

namespace qlsp {

int ensure_builtin_def(LoopProgram& p, const std::string& name) {
  for (int i = 0; i < (int)p.gates.size(); ++i)
    if (p.gates[i].name == name) return i;
  auto m = builtin_gate(name);
  GateDef d;
  d.name = name;
  d.length = 1;
  d.hint = GateHint::Matrix;
  d.mats = {*m};
  p.gates.push_back(std::move(d));
  return (int)p.gates.size() - 1;
}

namespace {

// Relation of the incoming instruction A to a placed instruction B; the
// first matching column wins.
enum class Rel {
  None,
  SqSame,     // B is a one-qubit gate on the syntactically same qubit
  SqAlias,    // B is a one-qubit gate on an aliasing qubit
  CzSame,     // B is a CZ with a syntactically shared operand
  CzAlias,    // B is a CZ with an aliasing operand
};

bool refs_same(const Ref& x, const Ref& y) {
  return x.array == y.array && x.idx == y.idx;
}

bool refs_alias(const Ref& x, const Ref& y, const IterRange& T) {
  return x.array == y.array && in_loop_alias(x.idx, y.idx, T);
}

Rel relation(const Instr& A, const Instr& B, const IterRange& T) {
  bool same = false, alias = false;
  for (const Ref& ra : instr_refs(A))
    for (const Ref& rb : instr_refs(B)) {
      if (refs_same(ra, rb)) same = true;
      else if (refs_alias(ra, rb, T)) alias = true;
    }
  if (!B.cz) {
    if (same) return Rel::SqSame;
    if (alias) return Rel::SqAlias;
  } else {
    if (same) return Rel::CzSame;
    if (alias) return Rel::CzAlias;
  }
  return Rel::None;
}

bool identical_cz(const Instr& a, const Instr& b) {
  return (refs_same(a.a, b.a) && refs_same(a.b, b.b)) ||
         (refs_same(a.a, b.b) && refs_same(a.b, b.a));
}

// One placement pass. `rightward` runs on the reversed body, so "earlier"
// in the placed list means later in program order; merge products and the
// side on which owed Z gates land mirror accordingly.
Body compact_pass(LoopProgram& p, const Body& input, const IterRange& T,
                  bool rightward) {
  Body src = input;
  if (rightward) std::reverse(src.begin(), src.end());
  int z_def = -1;  // created lazily; mutating p.gates mid-pass is fine

  Body placed;
  for (const Instr& A : src) {
    if (A.cz) {
      bool cancel = false;
      int target = -1;
      for (int bi = 0; bi < (int)placed.size(); ++bi) {
        Rel r = relation(A, placed[bi], T);
        if (r == Rel::None) continue;
        if (r == Rel::SqSame || r == Rel::SqAlias) {
          cancel = false;
          target = -1;
        } else if (r == Rel::CzSame) {
          if (identical_cz(A, placed[bi])) {
            cancel = true;
            target = bi;
          }
          // shared-operand but different pair: commutes, keep going
        }
        // CzAlias: commutes, keep going
      }
      if (cancel)
        placed.erase(placed.begin() + target);
      else
        placed.push_back(A);
      continue;
    }

    MatClass row = gate_class(p, A.g);
    bool merge = false;
    int target = -1;
    for (int bi = 0; bi < (int)placed.size(); ++bi) {
      Rel r = relation(A, placed[bi], T);
      if (r == Rel::None) continue;
      bool carry;
      switch (r) {
        case Rel::SqSame:
          merge = true;
          target = bi;
          continue;
        case Rel::SqAlias:
          carry = false;
          break;
        case Rel::CzSame:
          carry = row != MatClass::General;
          break;
        case Rel::CzAlias:
          carry = row == MatClass::Diagonal;
          break;
        default:
          carry = true;
      }
      if (!carry) {
        merge = false;
        target = -1;
      }
    }

    if (!merge) {
      placed.push_back(A);
      continue;
    }

    // Crossing a CZ that shares this qubit flips its effect on the other
    // operand's parity: each crossed CZ owes a Z on its other operand,
    // placed adjacent to the CZ on the side the gate came from.
    if (row == MatClass::AntiDiagonal) {
      for (int ci = (int)placed.size() - 1; ci > target; --ci) {
        const Instr& C = placed[ci];
        if (!C.cz) continue;
        bool on_a = refs_same(C.a, A.a);
        bool on_b = refs_same(C.b, A.a);
        if (!on_a && !on_b) continue;
        if (z_def < 0) z_def = ensure_builtin_def(p, "Z");
        Instr z;
        z.cz = false;
        z.g.factors = {{z_def, Lin{0, 0}}};
        z.a = on_a ? C.b : C.a;
        placed.insert(placed.begin() + (rightward ? ci : ci + 1), z);
      }
    }

    GateVal merged = rightward ? gate_merge(A.g, placed[target].g)
                               : gate_merge(placed[target].g, A.g);
    auto m = gate_matrix(p, merged);
    if (m && is_identity_up_to_phase(*m)) {
      placed.erase(placed.begin() + target);
    } else {
      placed[target].g = std::move(merged);
      placed[target].mark = false;
    }
  }

  if (rightward) std::reverse(placed.begin(), placed.end());
  return placed;
}

}  // namespace

Body compact_left(LoopProgram& p, const Body& body, const IterRange& T) {
  return compact_pass(p, body, T, false);
}

Body compact_right(LoopProgram& p, const Body& body, const IterRange& T) {
  return compact_pass(p, body, T, true);
}

namespace {
Body compact_fix(LoopProgram& p, Body body, const IterRange& T, bool rightward) {
  for (int guard = 0; guard < 64; ++guard) {
    Body next = compact_pass(p, body, T, rightward);
    if (next == body) return body;
    body = std::move(next);
  }
  return body;  // unreachable in practice; passes strictly shrink or settle
}
}  // namespace

Body compact_left_fix(LoopProgram& p, Body body, const IterRange& T) {
  return compact_fix(p, std::move(body), T, false);
}

Body compact_right_fix(LoopProgram& p, Body body, const IterRange& T) {
  return compact_fix(p, std::move(body), T, true);
}

Body compact_bidir(LoopProgram& p, Body body, const IterRange& T) {
  body = compact_right_fix(p, std::move(body), T);
  return compact_left_fix(p, std::move(body), T);
}

std::vector<i64> asap_ticks(const Body& body, const IterRange& T) {
  std::vector<i64> t(body.size(), 0);
  for (size_t i = 0; i < body.size(); ++i)
    for (size_t j = 0; j < i; ++j)
      if (instrs_alias(body[j], body[i], T)) t[i] = std::max(t[i], t[j] + 1);
  return t;
}

i64 asap_depth(const Body& body, const IterRange& T) {
  i64 d = 0;
  for (i64 t : asap_ticks(body, T)) d = std::max(d, t + 1);
  return d;
}

}  // namespace qlsp
