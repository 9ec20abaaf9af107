// Modulo scheduling of a loop body against its dependence graph. Issue
// ticks t assign each instruction a stage p = t div II and slot q = t mod II;
// the instance for source iteration x then runs at global step (x + p)*II + q.
#pragma once

#include "qlsp/qdg.hpp"

namespace qlsp {

struct ScheduleResult {
  bool feasible = false;
  i64 ii = 0;
  std::vector<i64> t;  // per body instruction
  i64 retries = 0;     // failed placement attempts (resource conflicts)
  i64 cap = 0;         // retry budget that was in force (summed over probes)
  bool sequential = false;  // fell back to the trivial one-per-tick schedule
};

// Attempt a schedule at a fixed initiation interval. `retry_cap` bounds the
// failed placement attempts for the whole call (0 picks n*n*II: inserting a
// block of m instructions costs at most m*n*II retries, n*n*II summed).
ScheduleResult schedule_at(const LoopProgram& p, const Body& body,
                           const Qdg& g, const IterRange& T, i64 ii,
                           i64 retry_cap = 0);

// Smallest feasible initiation interval in [1, max_ii], scheduling included.
// max_ii == 0 means the body length, where the one-per-tick schedule always
// fits, so the search cannot come back empty unless the body is empty or the
// caller lowered the ceiling.
ScheduleResult schedule_search(const LoopProgram& p, const Body& body,
                               const Qdg& g, const IterRange& T,
                               i64 max_ii = 0);

// Longest-path matrix of the dependence graph at a given II (weights
// min - II*dif). Returns false when a positive cycle makes the II
// infeasible. D is n*n, flattened row-major; unreachable = LLONG_MIN/4.
bool longest_paths(int n, const std::vector<QdgEdge>& edges, i64 ii,
                   std::vector<i64>& D);

// A compensating Z for an antidiagonal/CZ pair the schedule reordered.
// The gate at source iteration x crosses the CZ at iteration x + delta; the
// Z lands on the CZ's other operand, shares the CZ's tick, and only exists
// when both endpoint instances do (its source window shrinks by delta).
struct ZFix {
  int cz = 0;
  int sq = 0;
  i64 delta = 0;
  Ref zref;
};
std::vector<ZFix> inversion_fixes(const LoopProgram& p, const Body& body,
                                  const IterRange& T, const std::vector<i64>& t,
                                  i64 ii);

// Smallest shift s >= 1 with (A + s) disjoint from B; 0 if A or B is empty.
i64 min_clearing_shift(const std::vector<i64>& A, const std::vector<i64>& B);

// Human-readable reservation table (slot -> instructions with stage marks).
std::string schedule_print(const LoopProgram& p, const Body& body,
                           const ScheduleResult& s);

}  // namespace qlsp
