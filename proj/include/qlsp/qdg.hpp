// Dependence graph over loop-body instructions. Edges carry (min, dif):
// the destination must issue at least `min` ticks after the source when the
// source runs `dif` iterations earlier. Commutation prunes pairs that never
// constrain each other: CZs among themselves, CZs against diagonal gates,
// and (optionally) antidiagonal gates against CZs they track slope-for-
// slope, whose reordering is repaired later by explicit Z insertion.
#pragma once

#include "qlsp/ast.hpp"

namespace qlsp {

struct QdgEdge {
  int from = 0;
  int to = 0;
  i64 min = 1;
  i64 dif = 0;
};

struct Qdg {
  int n = 0;
  std::vector<QdgEdge> edges;  // one dominant edge per (from, to)
};

struct QdgOptions {
  // When true, antidiagonal/CZ pairs with matching nonzero slopes and no
  // alias on the CZ's other operand impose no ordering (their inversions
  // are fixed afterwards). Disabled for the legalization round.
  bool drop_antidiag_cz = true;
};

Qdg build_qdg(const LoopProgram& p, const Body& body, const IterRange& T,
              const QdgOptions& opt = {});

// Is the ordered pair exempt from dependence edges under the pruning rules?
bool qdg_pair_exempt(const LoopProgram& p, const Instr& a, const Instr& b,
                     const IterRange& T, const QdgOptions& opt);

// An antidiagonal gate that rides one CZ operand with the same nonzero slope
// and never meets the other. `delta` is the iteration offset: the gate at
// iteration x collides with the CZ at iteration x + delta. `other` is the
// untouched CZ operand (where a compensating Z lands if they reorder).
struct TrackedCross {
  i64 delta = 0;
  Ref other;
};
std::optional<TrackedCross> antidiag_cz_track(const LoopProgram& p,
                                              const Instr& sq, const Instr& cz,
                                              const IterRange& T);

// Keep only the dominant edge of a parallel bundle: smallest dif, then
// largest min. With min <= 1 the kept edge implies the others for every
// positive initiation interval.
std::vector<QdgEdge> reduce_parallel_edges(std::vector<QdgEdge> edges);

std::string qdg_print(const LoopProgram& p, const Body& body, const Qdg& g);

}  // namespace qlsp
