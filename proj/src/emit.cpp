#include "qlsp/emit.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "qlsp/compact.hpp"

namespace qlsp {

namespace {

struct Emitter {
  LoopProgram& p;
  std::vector<OutGateDef> composites;
  std::map<std::string, int> comp_ids;
  int base_defs = 0;

  explicit Emitter(LoopProgram& prog) : p(prog) {
    // Block compaction below may need Z; pin it now so definition indices
    // stay stable while statements are being built.
    ensure_builtin_def(p, "Z");
    base_defs = static_cast<int>(p.gates.size());
  }
};

std::string factors_key(const GateVal& g) {
  std::string k;
  for (const Factor& f : g.factors)
    k += std::to_string(f.def) + ":" + std::to_string(f.idx.k) + ":" +
         std::to_string(f.idx.b) + ";";
  return k;
}

Ex lin_ex(const Lin& l, const Ex& it) {
  return ex_add(ex_mul(ex_num(l.k), it), ex_num(l.b));
}

int composite_for(Emitter& em, const GateVal& g) {
  std::string key = factors_key(g);
  auto hit = em.comp_ids.find(key);
  if (hit != em.comp_ids.end()) return hit->second;
  OutGateDef d;
  d.name = "composite_" + std::to_string(em.composites.size() + 1);
  d.length = 1;
  if (auto m = gate_matrix(em.p, g)) {
    d.hint = GateHint::Matrix;
    d.mats = {*m};
  } else {
    switch (gate_class(em.p, g)) {
      case MatClass::Diagonal: d.hint = GateHint::Diag; break;
      case MatClass::AntiDiagonal: d.hint = GateHint::Anti; break;
      default: d.hint = GateHint::Unknown; break;
    }
    d.factors = g.factors;
  }
  int id = em.base_defs + static_cast<int>(em.composites.size());
  em.composites.push_back(std::move(d));
  em.comp_ids[key] = id;
  return id;
}

OutOp make_op(Emitter& em, const Instr& in, const Ex& it) {
  OutOp o;
  o.qa = in.a.array;
  o.ia = lin_ex(in.a.idx, it);
  if (in.cz) {
    o.cz = true;
    o.qb = in.b.array;
    o.ib = lin_ex(in.b.idx, it);
    return o;
  }
  if (in.g.factors.size() == 1) {
    const Factor& f = in.g.factors.front();
    o.gate = f.def;
    o.gate_idx = lin_ex(f.idx, it);
    return o;
  }
  int id = composite_for(em, in.g);
  const OutGateDef& d = em.composites[id - em.base_defs];
  o.gate = id;
  if (d.factors.empty()) {
    o.gate_idx = ex_num(0);  // collapsed to one concrete matrix
  } else {
    bool moving = false;
    for (const Factor& f : d.factors) moving = moving || f.idx.k != 0;
    o.gate_idx = moving ? it : ex_num(0);
  }
  return o;
}

void push_row(std::vector<OutStmt>& stmts, std::vector<OutOp> ops) {
  if (ops.empty()) return;
  OutStmt s;
  if (ops.size() == 1) {
    s.kind = OutStmt::Kind::Op;
    s.op = std::move(ops.front());
  } else {
    s.kind = OutStmt::Kind::Parallel;
    s.par = std::move(ops);
  }
  stmts.push_back(std::move(s));
}

// Lay a straight-line instance list out as parallel rows; returns the depth.
// `base` is the anchor the instance indices are linear in (Num for concrete
// instances). Compaction treats the anchor as one opaque integer, which the
// range "all of Z" models exactly.
i64 emit_block(Emitter& em, std::vector<Instr> list, const Ex& base,
               bool compact, std::vector<OutStmt>& stmts) {
  list.erase(std::remove_if(list.begin(), list.end(),
                            [](const Instr& in) {
                              return !in.cz && in.g.factors.empty();
                            }),
             list.end());
  if (list.empty()) return 0;
  if (compact) list = compact_bidir(em.p, std::move(list), IterRange::all());
  std::vector<i64> tk = asap_ticks(list, IterRange::all());
  i64 depth = *std::max_element(tk.begin(), tk.end()) + 1;
  for (i64 r = 0; r < depth; ++r) {
    std::vector<OutOp> ops;
    for (size_t i = 0; i < list.size(); ++i)
      if (tk[i] == r) ops.push_back(make_op(em, list[i], base));
    push_row(stmts, std::move(ops));
  }
  return depth;
}

Ex bound_ex(const std::string& name, bool is_num) {
  return is_num ? ex_num(std::stoll(name)) : ex_var(name);
}

// The source loop laid out as compacted parallel rows (the fallback shape
// and the kernel-asap emission mode).
std::vector<OutStmt> source_loop_stmts(Emitter& em) {
  std::vector<OutStmt> out;
  const LoopProgram& p = em.p;
  if (p.body.empty() || p.range.empty()) return out;
  OutStmt f;
  f.kind = OutStmt::Kind::For;
  f.var = p.var;
  f.lo = p.range.known ? ex_num(p.range.lo) : bound_ex(p.lo_name, p.lo_is_num);
  f.hi = p.range.known ? ex_num(p.range.hi) : bound_ex(p.hi_name, p.hi_is_num);
  std::vector<i64> tk = asap_ticks(p.body, p.range);
  i64 depth = *std::max_element(tk.begin(), tk.end()) + 1;
  Ex it = ex_var(p.var);
  for (i64 r = 0; r < depth; ++r) {
    std::vector<OutOp> ops;
    for (size_t i = 0; i < p.body.size(); ++i)
      if (tk[i] == r) ops.push_back(make_op(em, p.body[i], it));
    push_row(f.body, std::move(ops));
  }
  out.push_back(std::move(f));
  return out;
}

struct CaseOut {
  std::vector<OutStmt> stmts;
  i64 pre_depth = 0, post_depth = 0, qsp_iters = 0;
};

// Instances of one scheduled round near a window edge, in issue order.
struct EdgeSide {
  i64 from = 0, to = 0;  // issue offsets relative to the anchor
};

CaseOut case_stmts(Emitter& em, const CasePlan& cp, const CompileOptions& opt,
                   const Ex& n_ex, i64 C) {
  CaseOut co;
  const bool known = cp.rot.range.known;
  const i64 S0v = known ? cp.rot.range.lo : 0;
  const i64 E1v = known ? cp.rot.range.hi : 0;
  const i64 trips1 = known ? cp.rot.range.trips() : 0;
  const i64 wtrips = trips1 + cp.whi - cp.wlo;
  Ex S0x, E1x;
  if (!known) {
    Ex m_ex = bound_ex(em.p.lo_name, em.p.lo_is_num);
    S0x = ex_div(ex_sub(m_ex, ex_num(cp.uc.q)), ex_num(C));
    Ex E0x = ex_div(ex_sub(n_ex, ex_num(cp.uc.q + C - 1)), ex_num(C));
    E1x = ex_sub(E0x, ex_num(cp.rot.steps));
  }
  auto place = [&](const Instr& in, i64 off, bool at_end) {
    Instr s = instr_shifted(in, off);
    if (known) s = instr_at(s, at_end ? E1v : S0v);
    return s;
  };

  // Entry orders within one issue iteration: slot, then original position.
  auto tick_order = [](const std::vector<PipeEntry>& es) {
    std::vector<size_t> ix(es.size());
    for (size_t i = 0; i < ix.size(); ++i) ix[i] = i;
    std::sort(ix.begin(), ix.end(), [&](size_t a, size_t b) {
      return es[a].q != es[b].q ? es[a].q < es[b].q : es[a].c < es[b].c;
    });
    return ix;
  };
  std::vector<size_t> ord1 = tick_order(cp.e1), ord2 = tick_order(cp.e2);

  // ---- prologue: rotation peel, then round-1 fill, then round-2 fill ----
  std::vector<Instr> pro;
  for (const EdgeInstr& e : cp.rot.prologue)
    pro.push_back(place(e.in, e.off, false));
  i64 minP1 = cp.wlo, maxP1h = cp.whi;
  for (const PipeEntry& e : cp.e1) {
    minP1 = std::min(minP1, e.p + e.lpad);
    maxP1h = std::max(maxP1h, e.p + e.hpad);
  }
  for (i64 r = minP1; r < cp.wlo; ++r)
    for (size_t i : ord1) {
      const PipeEntry& e = cp.e1[i];
      if (r < e.p + e.lpad) continue;
      if (known && r - e.p - e.hpad > trips1 - 1) continue;
      pro.push_back(place(e.in, r - e.p, false));
    }
  for (i64 r = cp.w2hi; r < cp.w2lo; ++r)
    for (size_t i : ord2) {
      const PipeEntry& e = cp.e2[i];
      if (r < e.p) continue;
      if (known && r - e.p > wtrips - 1) continue;
      pro.push_back(place(e.in, cp.wlo + r - e.p, false));
    }
  co.pre_depth = emit_block(em, std::move(pro), known ? ex_num(0) : S0x,
                            opt.compact, co.stmts);

  // ---- kernel ----
  {
    OutStmt f;
    f.kind = OutStmt::Kind::For;
    f.var = em.p.var;
    i64 lo_off = cp.wlo + cp.w2lo, hi_off = cp.whi + cp.w2hi;
    f.lo = known ? ex_num(S0v + lo_off) : ex_add(S0x, ex_num(lo_off));
    f.hi = known ? ex_num(E1v + hi_off) : ex_add(E1x, ex_num(hi_off));
    if (known) co.qsp_iters = (E1v + hi_off) - (S0v + lo_off) + 1;
    Ex it = ex_var(f.var);
    for (i64 q = 0; q < cp.ii; ++q) {
      // Entries sharing a slot and an identical shifted line fold into one
      // composite, earlier source iterations first.
      std::vector<size_t> row;
      for (size_t i = 0; i < cp.e2.size(); ++i)
        if (cp.e2[i].q == q) row.push_back(i);
      std::sort(row.begin(), row.end(),
                [&](size_t a, size_t b) { return cp.e2[a].c < cp.e2[b].c; });
      std::vector<bool> used(row.size(), false);
      std::vector<OutOp> ops;
      for (size_t a = 0; a < row.size(); ++a) {
        if (used[a]) continue;
        const PipeEntry& ea = cp.e2[row[a]];
        Instr ia = instr_shifted(ea.in, -ea.p);
        if (ia.cz) {
          ops.push_back(make_op(em, ia, it));
          continue;
        }
        std::vector<size_t> group{a};
        for (size_t b = a + 1; b < row.size(); ++b) {
          if (used[b] || cp.e2[row[b]].in.cz) continue;
          Instr ib = instr_shifted(cp.e2[row[b]].in, -cp.e2[row[b]].p);
          if (ib.a == ia.a) group.push_back(b);
        }
        std::sort(group.begin(), group.end(), [&](size_t x, size_t y) {
          const PipeEntry &px = cp.e2[row[x]], &py = cp.e2[row[y]];
          i64 sx = px.p + px.p_prev, sy = py.p + py.p_prev;
          return sx != sy ? sx > sy : px.c < py.c;
        });
        GateVal g;
        for (size_t m : group) {
          const PipeEntry& e = cp.e2[row[m]];
          g = gate_merge(g, instr_shifted(e.in, -e.p).g);
          used[m] = true;
        }
        auto mat = gate_matrix(em.p, g);
        if (mat && is_identity_up_to_phase(*mat)) continue;
        Instr merged = ia;
        merged.g = g;
        ops.push_back(make_op(em, merged, it));
      }
      push_row(f.body, std::move(ops));
    }
    co.stmts.push_back(std::move(f));
  }

  // ---- epilogue: round-2 drain, round-1 drain, rotation peel, leftovers --
  std::vector<Instr> epi;
  for (i64 r = cp.w2hi + 1; r <= cp.w2lo; ++r)
    for (size_t i : ord2) {
      const PipeEntry& e = cp.e2[i];
      if (r > e.p) continue;
      if (known && e.p - r > wtrips - 1) continue;
      epi.push_back(place(e.in, cp.whi + r - e.p, true));
    }
  for (i64 r = cp.whi + 1; r <= maxP1h; ++r)
    for (size_t i : ord1) {
      const PipeEntry& e = cp.e1[i];
      if (r > e.p + e.hpad) continue;
      if (known && r < e.p + e.lpad - (trips1 - 1)) continue;
      epi.push_back(place(e.in, r - e.p, true));
    }
  for (const EdgeInstr& e : cp.rot.epilogue)
    epi.push_back(place(e.in, e.off, true));
  for (const Instr& in : cp.uc.remainder) epi.push_back(in);
  co.post_depth = emit_block(em, std::move(epi), known ? ex_num(0) : E1x,
                             opt.compact, co.stmts);

  // Unknown ranges: the iterations past the last full unroll block.
  if (!known) {
    Ex m_ex = bound_ex(em.p.lo_name, em.p.lo_is_num);
    Ex trips_ex = ex_add(ex_sub(n_ex, m_ex), ex_num(1));
    OutStmt f;
    f.kind = OutStmt::Kind::For;
    f.var = em.p.var;
    f.lo = ex_add(ex_mul(ex_num(C), ex_div(trips_ex, ex_num(C))), m_ex);
    f.hi = n_ex;
    Ex it = ex_var(f.var);
    std::vector<i64> tk = asap_ticks(em.p.body, IterRange::all());
    i64 depth = em.p.body.empty()
                    ? 0
                    : *std::max_element(tk.begin(), tk.end()) + 1;
    for (i64 r = 0; r < depth; ++r) {
      std::vector<OutOp> ops;
      for (size_t i = 0; i < em.p.body.size(); ++i)
        if (tk[i] == r) ops.push_back(make_op(em, em.p.body[i], it));
      push_row(f.body, std::move(ops));
    }
    co.stmts.push_back(std::move(f));
  }
  return co;
}

void finish(Emitter& em, OutProgram& out) {
  out.qubits = em.p.qubits;
  for (const GateDef& d : em.p.gates) {
    OutGateDef o;
    o.name = d.name;
    o.length = d.length;
    o.hint = d.hint;
    o.mats = d.mats;
    out.gates.push_back(std::move(o));
  }
  for (const OutGateDef& d : em.composites) out.gates.push_back(d);
}

void straight_ops(Emitter& em, const Body& b, std::vector<OutStmt>& stmts) {
  for (const Instr& in : b) {
    if (!in.cz && in.g.factors.empty()) continue;
    OutStmt s;
    s.kind = OutStmt::Kind::Op;
    s.op = make_op(em, in, ex_num(0));
    stmts.push_back(std::move(s));
  }
}

}  // namespace

EmitResult emit_pipelined(LoopProgram& p, const std::vector<CasePlan>& plans,
                          const CompileOptions& opt) {
  EmitResult er;
  Emitter em(p);
  const i64 C = std::max<i64>(1, opt.unroll);
  straight_ops(em, p.pre, er.out.stmts);

  if (p.range.known) {
    const CasePlan& cp = plans.front();
    if (cp.fallback) {
      auto loop = source_loop_stmts(em);
      er.out.stmts.insert(er.out.stmts.end(), loop.begin(), loop.end());
    } else {
      CaseOut co = case_stmts(em, cp, opt, ex_num(p.range.hi), C);
      er.out.stmts.insert(er.out.stmts.end(), co.stmts.begin(),
                          co.stmts.end());
      er.pre_depth = co.pre_depth;
      er.post_depth = co.post_depth;
      er.qsp_iters = co.qsp_iters;
    }
  } else {
    Ex m_ex = bound_ex(p.lo_name, p.lo_is_num);
    Ex n_ex = bound_ex(p.hi_name, p.hi_is_num);

    std::vector<const CasePlan*> live;
    if (p.lo_is_num) {
      i64 q0 = euc_mod(std::stoll(p.lo_name), C);
      for (const CasePlan& cp : plans)
        if (cp.uc.q == q0) live.push_back(&cp);
    } else {
      for (const CasePlan& cp : plans) live.push_back(&cp);
    }

    bool all_fallback = true;
    i64 jmax = 1;
    for (const CasePlan* cp : live) {
      all_fallback = all_fallback && cp->fallback;
      jmax = std::max(jmax, cp->jmin);
    }
    if (all_fallback) {
      auto loop = source_loop_stmts(em);
      er.out.stmts.insert(er.out.stmts.end(), loop.begin(), loop.end());
    } else {
      const i64 min_trips = C * jmax + 2 * (C - 1);
      OutStmt g;
      g.kind = OutStmt::Kind::Guard;
      {
        OutCase c;
        c.lhs = ex_add(ex_sub(n_ex, m_ex), ex_num(1));
        c.cmp = Cmp::Lt;
        c.rhs = ex_num(min_trips);
        c.body = source_loop_stmts(em);
        g.cases.push_back(std::move(c));
      }
      for (size_t i = 0; i < live.size(); ++i) {
        OutCase c;
        if (i + 1 == live.size()) {
          c.otherwise = true;
        } else {
          c.lhs = ex_mod(m_ex, ex_num(C));
          c.cmp = Cmp::Eq;
          c.rhs = ex_num(live[i]->uc.q);
        }
        if (live[i]->fallback) {
          c.body = source_loop_stmts(em);
        } else {
          c.body = case_stmts(em, *live[i], opt, n_ex, C).stmts;
        }
        g.cases.push_back(std::move(c));
      }
      er.out.stmts.push_back(std::move(g));
    }
  }

  straight_ops(em, p.post, er.out.stmts);
  finish(em, er.out);
  return er;
}

OutProgram emit_kernel_asap(LoopProgram& p, bool compact) {
  (void)compact;  // the body was already compacted (or not) by the caller
  Emitter em(p);
  OutProgram out;
  straight_ops(em, p.pre, out.stmts);
  auto loop = source_loop_stmts(em);
  out.stmts.insert(out.stmts.end(), loop.begin(), loop.end());
  straight_ops(em, p.post, out.stmts);
  finish(em, out);
  return out;
}

OutProgram emit_unrolled_asap(LoopProgram& p, bool compact) {
  if (!p.range.known)
    throw std::runtime_error("unrolled layout needs known loop bounds");
  Emitter em(p);
  OutProgram out;
  straight_ops(em, p.pre, out.stmts);
  std::vector<Instr> inst;
  if (!p.range.empty())
    for (i64 x = p.range.lo; x <= p.range.hi; ++x)
      for (const Instr& in : p.body) inst.push_back(instr_at(in, x));
  emit_block(em, std::move(inst), ex_num(0), compact, out.stmts);
  straight_ops(em, p.post, out.stmts);
  finish(em, out);
  return out;
}

}  // namespace qlsp
