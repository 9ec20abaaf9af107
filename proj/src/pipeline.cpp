#include "qlsp/pipeline.hpp"

#include <algorithm>

#include "qlsp/compact.hpp"
#include "qlsp/emit.hpp"

namespace qlsp {

namespace {

Body entry_body(const std::vector<PipeEntry>& es) {
  Body b;
  b.reserve(es.size());
  for (const PipeEntry& e : es) b.push_back(e.in);
  return b;
}

void set_ticks(std::vector<PipeEntry>& es, const std::vector<i64>& t, i64 ii) {
  for (size_t i = 0; i < es.size(); ++i) {
    es[i].t = t[i];
    es[i].p = euc_div(t[i], ii);
    es[i].q = euc_mod(t[i], ii);
  }
}

// Z pairs on the same line at the same tick with identical validity cancel.
void drop_z_pairs(std::vector<PipeEntry>& es, i64 n_orig) {
  for (size_t i = 0; i < es.size(); ++i) {
    if (es[i].c < n_orig) continue;
    for (size_t j = i + 1; j < es.size(); ++j) {
      if (es[j].c < n_orig) continue;
      if (es[i].t != es[j].t || !(es[i].in == es[j].in)) continue;
      if (es[i].lpad != es[j].lpad || es[i].hpad != es[j].hpad) continue;
      es.erase(es.begin() + j);
      es.erase(es.begin() + i);
      --i;
      break;
    }
  }
}

CasePlan build_case(LoopProgram& p, const UnrollCase& uc,
                    const CompileOptions& opt, CompileResult& acc) {
  CasePlan cp;
  cp.uc = uc;

  {
    Body cb = uc.body;
    if (opt.compact) cb = compact_bidir(p, cb, uc.jrange);
    cp.c_asap = asap_depth(cb, uc.jrange);
  }
  if (uc.jrange.empty() || uc.body.empty()) {
    cp.fallback = true;
    return cp;
  }

  // Rotation (compaction-driven, so the master switch covers it too).
  if (opt.compact) {
    cp.rot = rotate(p, uc.body, uc.jrange);
  } else {
    cp.rot.body = uc.body;
    cp.rot.range = uc.jrange;
  }
  const IterRange T1 = cp.rot.range;
  if (T1.empty()) {
    cp.fallback = true;
    return cp;
  }

  // Round 1: placement with full commutation freedom.
  Qdg g1 = build_qdg(p, cp.rot.body, T1, {true});
  if (opt.dump_qdg)
    acc.qdg_dump += "case q=" + std::to_string(uc.q) + " round 1\n" +
                    qdg_print(p, cp.rot.body, g1);
  ScheduleResult s1 = schedule_search(p, cp.rot.body, g1, T1, opt.max_ii);
  acc.retries += s1.retries;
  acc.retry_cap += s1.cap;
  if (!s1.feasible) {
    cp.fallback = true;
    return cp;
  }
  if (opt.dump_table)
    acc.table_dump += "case q=" + std::to_string(uc.q) + " round 1\n" +
                      schedule_print(p, cp.rot.body, s1);

  const i64 n1 = static_cast<i64>(cp.rot.body.size());
  for (i64 c = 0; c < n1; ++c) {
    PipeEntry e;
    e.in = cp.rot.body[c];
    e.c = c;
    cp.e1.push_back(e);
  }
  set_ticks(cp.e1, s1.t, s1.ii);

  // Compensating Zs for antidiagonal/CZ pairs the schedule reordered. They
  // ride at the CZ's tick and only exist where both crossing endpoints do.
  std::vector<ZFix> zs = inversion_fixes(p, cp.rot.body, T1, s1.t, s1.ii);
  if (!zs.empty()) {
    int zdef = ensure_builtin_def(p, "Z");
    for (size_t j = 0; j < zs.size(); ++j) {
      PipeEntry e;
      e.in.cz = false;
      e.in.g.factors.push_back({zdef, {0, 0}});
      e.in.a = zs[j].zref;
      e.c = n1 + static_cast<i64>(j);
      e.t = s1.t[zs[j].cz];
      e.p = euc_div(e.t, s1.ii);
      e.q = euc_mod(e.t, s1.ii);
      e.lpad = std::max<i64>(0, zs[j].delta);
      e.hpad = std::min<i64>(0, zs[j].delta);
      cp.e1.push_back(e);
    }
  }

  cp.wlo = cp.e1.front().p + cp.e1.front().lpad;
  cp.whi = cp.e1.front().p + cp.e1.front().hpad;
  for (const PipeEntry& e : cp.e1) {
    cp.wlo = std::max(cp.wlo, e.p + e.lpad);
    cp.whi = std::min(cp.whi, e.p + e.hpad);
  }
  if (T1.known && T1.trips() + cp.whi - cp.wlo < 1) {
    cp.fallback = true;  // steady state never forms
    return cp;
  }

  // Round 2: the steady-state kernel, rescheduled with reordering of
  // antidiagonal/CZ pairs disabled so no new compensation is ever owed.
  // Within one kernel iteration an instruction executes at its slot, and a
  // stage-p instruction belongs to the iteration started p rounds earlier,
  // so slot order (deeper stage first on ties) is the execution order.
  std::vector<PipeEntry> b2 = cp.e1;
  std::sort(b2.begin(), b2.end(), [](const PipeEntry& a, const PipeEntry& b) {
    if (a.q != b.q) return a.q < b.q;
    if (a.p != b.p) return a.p > b.p;
    return a.c < b.c;
  });
  drop_z_pairs(b2, n1);
  for (size_t j = 0; j < b2.size(); ++j) {
    PipeEntry& e = b2[j];
    e.in = instr_shifted(e.in, -e.p);
    e.p_prev = e.p;
    e.c = static_cast<i64>(j);
    e.lpad = e.hpad = 0;
  }
  IterRange T2 = T1.known
                     ? IterRange::of(T1.lo + cp.wlo, T1.hi + cp.whi)
                     : IterRange::all();
  Body body2 = entry_body(b2);
  Qdg g2 = build_qdg(p, body2, T2, {false});
  if (opt.dump_qdg)
    acc.qdg_dump += "case q=" + std::to_string(uc.q) + " round 2\n" +
                    qdg_print(p, body2, g2);
  ScheduleResult s2 = schedule_search(p, body2, g2, T2, opt.max_ii);
  acc.retries += s2.retries;
  acc.retry_cap += s2.cap;
  if (!s2.feasible) {
    cp.fallback = true;
    return cp;
  }
  if (opt.dump_table)
    acc.table_dump += "case q=" + std::to_string(uc.q) + " round 2\n" +
                      schedule_print(p, body2, s2);
  cp.e2 = std::move(b2);
  set_ticks(cp.e2, s2.t, s2.ii);
  cp.ii = s2.ii;

  cp.w2lo = cp.e2.front().p;
  cp.w2hi = cp.e2.front().p;
  for (const PipeEntry& e : cp.e2) {
    cp.w2lo = std::max(cp.w2lo, e.p);
    cp.w2hi = std::min(cp.w2hi, e.p);
  }
  if (T2.known && T2.trips() - (cp.w2lo - cp.w2hi) < 1) {
    cp.fallback = true;
    return cp;
  }

  // Not worth it: the plain compacted iteration is at least as shallow.
  if (cp.ii >= cp.c_asap) {
    cp.fallback = true;
    return cp;
  }

  cp.jmin = 1 + cp.rot.steps + (cp.wlo - cp.whi) + (cp.w2lo - cp.w2hi);
  return cp;
}

}  // namespace

CompileResult compile(LoopProgram p, const CompileOptions& opt) {
  CompileResult res;
  const Body orig_body = p.body;

  if (opt.compact) p.body = compact_bidir(p, p.body, p.range);
  const i64 asap = asap_depth(p.body, p.range);

  const i64 C = std::max<i64>(1, opt.unroll);
  Unrolled un = unroll(p, p.body, p.range, C);

  std::vector<CasePlan> plans;
  for (const UnrollCase& uc : un.cases)
    plans.push_back(build_case(p, uc, opt, res));
  for (const CasePlan& cp : plans) res.fallback = res.fallback || cp.fallback;

  EmitResult er = emit_pipelined(p, plans, opt);
  switch (opt.emit) {
    case EmitMode::Pipelined:
      res.out = std::move(er.out);
      break;
    case EmitMode::KernelAsap:
      res.out = emit_kernel_asap(p, opt.compact);
      break;
    case EmitMode::UnrolledAsap:
      res.out = emit_unrolled_asap(p, opt.compact);
      break;
  }

  if (p.range.known) {
    res.have_stats = true;
    Stats& st = res.stats;
    const CasePlan& cp = plans.front();
    st.asap = asap;
    st.c_asap = cp.c_asap;
    st.iters = p.range.empty() ? 0 : p.range.trips();
    st.kernel_asap_total = st.asap * st.iters;
    {
      Body inst;
      for (i64 x = p.range.lo; x <= p.range.hi; ++x)
        for (const Instr& in : orig_body) inst.push_back(instr_at(in, x));
      if (opt.compact) inst = compact_bidir(p, inst, IterRange::all());
      st.unroll_total = asap_depth(inst, IterRange::all());
    }
    if (cp.fallback) {
      st.kernel_depth = st.asap;
      st.qsp_iters = st.iters;
      st.pre_depth = 0;
      st.post_depth = 0;
    } else {
      st.kernel_depth = cp.ii;
      st.qsp_iters = er.qsp_iters;
      st.pre_depth = er.pre_depth;
      st.post_depth = er.post_depth;
    }
    st.qsp_total =
        st.pre_depth + st.kernel_depth * st.qsp_iters + st.post_depth;
  }
  return res;
}

}  // namespace qlsp
