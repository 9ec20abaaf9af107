#include "qlsp/schedule.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

#include "qlsp/alias.hpp"

namespace qlsp {

namespace {

constexpr i64 kNeg = LLONG_MIN / 4;

// Strongly connected components (Tarjan). Component ids come out in reverse
// topological order: every edge leaving a component points at a lower id.
struct SccFinder {
  int n;
  std::vector<std::vector<int>> adj;
  std::vector<int> comp, low, num, stk;
  std::vector<bool> on;
  int counter = 0;
  int ncomp = 0;

  explicit SccFinder(int n_) : n(n_), adj(n_), comp(n_, -1), low(n_), num(n_, -1), on(n_, false) {}

  void dfs(int v) {
    num[v] = low[v] = counter++;
    stk.push_back(v);
    on[v] = true;
    for (int w : adj[v]) {
      if (num[w] < 0) {
        dfs(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], num[w]);
      }
    }
    if (low[v] == num[v]) {
      while (true) {
        int w = stk.back();
        stk.pop_back();
        on[w] = false;
        comp[w] = ncomp;
        if (w == v) break;
      }
      ++ncomp;
    }
  }

  void run() {
    for (int v = 0; v < n; ++v)
      if (num[v] < 0) dfs(v);
  }
};

struct Unit {
  std::vector<int> mem;      // instruction indices, ascending
  std::vector<i64> off;      // tick offset of each member from the base
  i64 height = 0;            // longest-path priority
};

enum class Clash { No, Soft, Hard };

Clash pair_clash(const Instr& A, i64 pa, const Instr& B, i64 pb,
                 const IterRange& T) {
  Clash worst = Clash::No;
  for (const Ref& ra : instr_refs(A)) {
    for (const Ref& rb : instr_refs(B)) {
      if (ra.array != rb.array) continue;
      switch (shifted_conflict(ra.idx, pa, rb.idx, pb, T)) {
        case PairConflict::None:
          break;
        case PairConflict::Persistent:
          // Two plain gates riding the same moving qubit line fold into one
          // composite at emission. With a CZ involved they cannot fold, but
          // the line moves (k != 0), so a stage delay slides the collision
          // away: a false conflict, retried without the countdown.
          if (A.cz || B.cz)
            if (worst == Clash::No) worst = Clash::Soft;
          break;
        case PairConflict::True:
          worst = Clash::Hard;
          break;
        case PairConflict::False:
          if (worst == Clash::No) worst = Clash::Soft;
          break;
      }
    }
  }
  return worst;
}

}  // namespace

bool longest_paths(int n, const std::vector<QdgEdge>& edges, i64 ii,
                   std::vector<i64>& D) {
  D.assign(static_cast<size_t>(n) * n, kNeg);
  for (const QdgEdge& e : edges) {
    i64 w = e.min - ii * e.dif;
    i64& cell = D[static_cast<size_t>(e.from) * n + e.to];
    cell = std::max(cell, w);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      i64 ik = D[static_cast<size_t>(i) * n + k];
      if (ik == kNeg) continue;
      for (int j = 0; j < n; ++j) {
        i64 kj = D[static_cast<size_t>(k) * n + j];
        if (kj == kNeg) continue;
        i64& cell = D[static_cast<size_t>(i) * n + j];
        cell = std::max(cell, ik + kj);
      }
    }
  for (int i = 0; i < n; ++i)
    if (D[static_cast<size_t>(i) * n + i] > 0) return false;
  return true;
}

ScheduleResult schedule_at(const LoopProgram& p, const Body& body,
                           const Qdg& g, const IterRange& T, i64 ii,
                           i64 retry_cap) {
  (void)p;
  ScheduleResult res;
  res.ii = ii;
  const int n = static_cast<int>(body.size());
  if (n == 0) {
    res.feasible = true;
    return res;
  }
  if (ii < 1) return res;
  if (retry_cap <= 0) retry_cap = static_cast<i64>(n) * n * ii;
  res.cap = retry_cap;

  std::vector<i64> D;
  if (!longest_paths(n, g.edges, ii, D)) return res;
  auto d = [&](int i, int j) { return D[static_cast<size_t>(i) * n + j]; };
  for (int i = 0; i < n; ++i)
    D[static_cast<size_t>(i) * n + i] = std::max<i64>(d(i, i), 0);

  SccFinder scc(n);
  for (const QdgEdge& e : g.edges)
    if (e.from != e.to) scc.adj[e.from].push_back(e.to);
  scc.run();

  std::vector<Unit> units(scc.ncomp);
  for (int v = 0; v < n; ++v) units[scc.comp[v]].mem.push_back(v);
  for (Unit& u : units) {
    int anchor = u.mem.front();
    for (int v : u.mem) {
      i64 off = v == anchor ? 0 : d(anchor, v);
      u.off.push_back(off);
      for (int j = 0; j < n; ++j)
        if (d(v, j) > kNeg) u.height = std::max(u.height, d(v, j));
    }
  }

  // Condensed-graph topological sweep, highest path-to-go first among ready.
  std::vector<int> pend(units.size(), 0);
  std::vector<std::vector<int>> succ(units.size());
  for (const QdgEdge& e : g.edges) {
    int cu = scc.comp[e.from], cv = scc.comp[e.to];
    if (cu == cv) continue;
    succ[cu].push_back(cv);
    ++pend[cv];
  }
  std::vector<int> ready;
  for (size_t u = 0; u < units.size(); ++u)
    if (pend[u] == 0) ready.push_back(static_cast<int>(u));

  std::vector<i64> t(n, 0);
  std::vector<bool> placed(n, false);
  auto pick_ready = [&]() {
    size_t best = 0;
    for (size_t i = 1; i < ready.size(); ++i) {
      const Unit &a = units[ready[i]], &b = units[ready[best]];
      if (a.height > b.height ||
          (a.height == b.height && a.mem.front() < b.mem.front()))
        best = i;
    }
    int u = ready[best];
    ready.erase(ready.begin() + best);
    return u;
  };

  size_t left = units.size();
  while (left--) {
    if (ready.empty()) return res;  // cycle across components: cannot happen
    const int ui = pick_ready();
    const Unit& u = units[ui];

    i64 base = 0;
    for (int w = 0; w < n; ++w) {
      if (!placed[w]) continue;
      for (size_t mi = 0; mi < u.mem.size(); ++mi) {
        int v = u.mem[mi];
        if (d(w, v) > kNeg) base = std::max(base, t[w] + d(w, v) - u.off[mi]);
      }
    }

    i64 budget = -1;  // armed on the first hard conflict
    bool done = false;
    while (!done) {
      Clash worst = Clash::No;
      for (size_t mi = 0; mi < u.mem.size() && worst != Clash::Hard; ++mi) {
        int v = u.mem[mi];
        i64 tv = base + u.off[mi];
        i64 pv = euc_div(tv, ii);
        for (size_t mj = mi + 1; mj < u.mem.size() && worst != Clash::Hard; ++mj) {
          int x = u.mem[mj];
          i64 tx = base + u.off[mj];
          if (euc_mod(tv, ii) != euc_mod(tx, ii)) continue;
          Clash c = pair_clash(body[v], pv, body[x], euc_div(tx, ii), T);
          if (c != Clash::No) worst = std::max(worst, c);
        }
        for (int w = 0; w < n && worst != Clash::Hard; ++w) {
          if (!placed[w] || euc_mod(tv, ii) != euc_mod(t[w], ii)) continue;
          Clash c = pair_clash(body[v], pv, body[w], euc_div(t[w], ii), T);
          if (c != Clash::No) worst = std::max(worst, c);
        }
      }
      if (worst == Clash::No) {
        done = true;
        break;
      }
      ++res.retries;
      if (res.retries >= retry_cap) return res;
      if (budget == 0) return res;
      if (budget > 0) --budget;
      if (worst == Clash::Hard && budget < 0) budget = ii - 1;
      ++base;
    }
    for (size_t mi = 0; mi < u.mem.size(); ++mi) {
      t[u.mem[mi]] = base + u.off[mi];
      placed[u.mem[mi]] = true;
    }
    for (int v : succ[ui])
      if (--pend[v] == 0) ready.push_back(v);
  }

  i64 tmin = *std::min_element(t.begin(), t.end());
  for (i64& x : t) x -= tmin;
  for (const QdgEdge& e : g.edges)
    if (t[e.to] - t[e.from] < e.min - ii * e.dif) return res;  // defensive
  res.feasible = true;
  res.t = std::move(t);
  return res;
}

ScheduleResult schedule_search(const LoopProgram& p, const Body& body,
                               const Qdg& g, const IterRange& T, i64 max_ii) {
  const i64 n = static_cast<i64>(body.size());
  if (n == 0) {
    ScheduleResult res;
    res.feasible = true;
    res.ii = 1;
    return res;
  }
  if (max_ii <= 0) max_ii = n;
  max_ii = std::min(max_ii, n);

  auto attempt = [&](i64 ii) {
    ScheduleResult r = schedule_at(p, body, g, T, ii);
    if (!r.feasible && ii >= n) {
      // One instruction per tick always satisfies every edge and slot.
      r.feasible = true;
      r.sequential = true;
      r.t.resize(n);
      for (i64 c = 0; c < n; ++c) r.t[c] = c;
    }
    return r;
  };

  // Bisect for the smallest workable interval, then walk to the exact
  // boundary in case feasibility is not monotone around the probe.
  i64 lo = 1, hi = max_ii, found = -1;
  i64 total_retries = 0, total_cap = 0;
  while (lo <= hi) {
    i64 mid = lo + (hi - lo) / 2;
    ScheduleResult r = attempt(mid);
    total_retries += r.retries;
    total_cap += r.cap;
    if (r.feasible) {
      found = mid;
      hi = mid - 1;
    } else {
      lo = mid + 1;
    }
  }
  if (found < 0) {
    ScheduleResult r;
    r.retries = total_retries;
    r.cap = total_cap;
    return r;
  }
  while (found > 1) {
    ScheduleResult r = attempt(found - 1);
    total_retries += r.retries;
    total_cap += r.cap;
    if (!r.feasible) break;
    --found;
  }
  ScheduleResult best = attempt(found);
  best.retries += total_retries;
  best.cap += total_cap;
  return best;
}

std::vector<ZFix> inversion_fixes(const LoopProgram& p, const Body& body,
                                  const IterRange& T, const std::vector<i64>& t,
                                  i64 ii) {
  std::vector<ZFix> out;
  const int n = static_cast<int>(body.size());
  for (int s = 0; s < n; ++s) {
    if (body[s].cz) continue;
    for (int z = 0; z < n; ++z) {
      if (!body[z].cz) continue;
      auto track = antidiag_cz_track(p, body[s], body[z], T);
      if (!track) continue;
      i64 ps = euc_div(t[s], ii), qs = euc_mod(t[s], ii);
      i64 pz = euc_div(t[z], ii), qz = euc_mod(t[z], ii);
      i64 gap = (track->delta + pz - ps) * ii + (qz - qs);
      bool sq_first = track->delta > 0 || (track->delta == 0 && s < z);
      bool inverted = sq_first ? gap < 0 : gap > 0;
      if (inverted) out.push_back({z, s, track->delta, track->other});
    }
  }
  return out;
}

i64 min_clearing_shift(const std::vector<i64>& A, const std::vector<i64>& B) {
  if (A.empty() || B.empty()) return 0;
  for (i64 s = 1;; ++s) {  // s past max(B) - min(A) always clears
    bool clear = true;
    for (i64 a : A)
      if (std::find(B.begin(), B.end(), a + s) != B.end()) clear = false;
    if (clear) return s;
  }
}

std::string schedule_print(const LoopProgram& p, const Body& body,
                           const ScheduleResult& s) {
  std::ostringstream os;
  if (!s.feasible) {
    os << "infeasible at ii=" << s.ii << "\n";
    return os.str();
  }
  os << "ii=" << s.ii << (s.sequential ? " (sequential)" : "")
     << " retries=" << s.retries << "\n";
  for (i64 q = 0; q < s.ii; ++q) {
    os << "  slot " << q << ":";
    bool any = false;
    for (size_t c = 0; c < body.size(); ++c) {
      if (euc_mod(s.t[c], s.ii) != q) continue;
      os << (any ? " | " : " ") << "p" << euc_div(s.t[c], s.ii) << " "
         << instr_str(p, body[c]);
      any = true;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace qlsp
