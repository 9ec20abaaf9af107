#include "qlsp/qdg.hpp"

#include <algorithm>
#include <sstream>

#include "qlsp/alias.hpp"

namespace qlsp {
namespace {

bool refs_alias_somewhere(const Ref& x, const Ref& y, const IterRange& T) {
  if (x.array != y.array) return false;
  if (in_loop_alias(x.idx, y.idx, T)) return true;
  if (across_loop_alias(x.idx, y.idx, T)) return true;
  if (across_loop_alias(y.idx, x.idx, T)) return true;
  return false;
}

bool merge_eligible(const Instr& a, const Instr& b) {
  return !a.cz && !b.cz && a.a.array == b.a.array && a.a.idx.k == b.a.idx.k;
}

}  // namespace

std::optional<TrackedCross> antidiag_cz_track(const LoopProgram& p,
                                              const Instr& sq, const Instr& cz,
                                              const IterRange& T) {
  if (sq.cz || !cz.cz) return std::nullopt;
  if (gate_class(p, sq.g) != MatClass::AntiDiagonal) return std::nullopt;
  const Ref& s = sq.a;
  const Ref ops[2] = {cz.a, cz.b};
  for (int j = 0; j < 2; ++j) {
    const Ref& o = ops[j];
    const Ref& other = ops[1 - j];
    if (o.array != s.array) continue;
    if (o.idx.k != s.idx.k || s.idx.k == 0) continue;
    if ((s.idx.b - o.idx.b) % s.idx.k != 0) continue;
    i64 delta = (s.idx.b - o.idx.b) / s.idx.k;
    if (T.known && T.lo + std::max<i64>(0, delta) > T.hi + std::min<i64>(0, delta))
      continue;  // the two instances never coexist
    if (refs_alias_somewhere(s, other, T)) continue;
    return TrackedCross{delta, other};
  }
  return std::nullopt;
}

bool qdg_pair_exempt(const LoopProgram& p, const Instr& a, const Instr& b,
                     const IterRange& T, const QdgOptions& opt) {
  if (a.cz && b.cz) return true;
  if (a.cz != b.cz) {
    const Instr& sq = a.cz ? b : a;
    const Instr& cz = a.cz ? a : b;
    if (gate_class(p, sq.g) == MatClass::Diagonal) return true;
    if (opt.drop_antidiag_cz && antidiag_cz_track(p, sq, cz, T)) return true;
  }
  return false;
}

std::vector<QdgEdge> reduce_parallel_edges(std::vector<QdgEdge> edges) {
  std::sort(edges.begin(), edges.end(), [](const QdgEdge& x, const QdgEdge& y) {
    if (x.from != y.from) return x.from < y.from;
    if (x.to != y.to) return x.to < y.to;
    if (x.dif != y.dif) return x.dif < y.dif;
    return x.min > y.min;
  });
  std::vector<QdgEdge> out;
  for (const QdgEdge& e : edges) {
    if (!out.empty() && out.back().from == e.from && out.back().to == e.to)
      continue;
    out.push_back(e);
  }
  return out;
}

Qdg build_qdg(const LoopProgram& p, const Body& body, const IterRange& T,
              const QdgOptions& opt) {
  const int n = static_cast<int>(body.size());
  std::vector<QdgEdge> edges;

  // Same-iteration ordering: program order between aliasing pairs.
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < b; ++a) {
      if (qdg_pair_exempt(p, body[a], body[b], T, opt)) continue;
      bool hit = false;
      for (const Ref& ra : instr_refs(body[a])) {
        for (const Ref& rb : instr_refs(body[b])) {
          if (ra.array == rb.array && in_loop_alias(ra.idx, rb.idx, T))
            hit = true;
        }
      }
      if (!hit) continue;
      i64 min = merge_eligible(body[a], body[b]) ? 0 : 1;
      edges.push_back({a, b, min, 0});
    }
  }

  // Cross-iteration ordering: any instruction against any (itself included)
  // at the nearest later iteration where their operands collide.
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (qdg_pair_exempt(p, body[a], body[b], T, opt)) continue;
      i64 min = merge_eligible(body[a], body[b]) ? 0 : 1;
      for (const Ref& ra : instr_refs(body[a])) {
        for (const Ref& rb : instr_refs(body[b])) {
          if (ra.array != rb.array) continue;
          if (auto d = across_loop_alias(ra.idx, rb.idx, T))
            edges.push_back({a, b, min, *d});
        }
      }
    }
  }

  Qdg g;
  g.n = n;
  g.edges = reduce_parallel_edges(std::move(edges));
  return g;
}

std::string qdg_print(const LoopProgram& p, const Body& body, const Qdg& g) {
  std::ostringstream os;
  os << "qdg nodes=" << g.n << " edges=" << g.edges.size() << "\n";
  for (int i = 0; i < g.n; ++i)
    os << "  [" << i << "] " << instr_str(p, body[i]) << "\n";
  for (const QdgEdge& e : g.edges)
    os << "  " << e.from << " -> " << e.to << "  min=" << e.min
       << " dif=" << e.dif << "\n";
  return os.str();
}

}  // namespace qlsp
