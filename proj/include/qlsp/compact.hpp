// Gate compaction: a one-pass placement machine that merges one-qubit gates
// into earlier (or later) gates they can reach by commuting, cancels
// identical CZ pairs, and accounts for the Z corrections owed when an
// antidiagonal gate crosses a CZ on a shared qubit. Also the plain ASAP
// tick assignment used for depth reporting and straight-line emission.
#pragma once

#include "qlsp/ast.hpp"

namespace qlsp {

// One pass over the body. Right-to-left passes mirror merge order and Z
// placement. May add builtin gate definitions (Z) to the program.
Body compact_left(LoopProgram& p, const Body& body, const IterRange& T);
Body compact_right(LoopProgram& p, const Body& body, const IterRange& T);

// Repeat until a pass makes no change.
Body compact_left_fix(LoopProgram& p, Body body, const IterRange& T);
Body compact_right_fix(LoopProgram& p, Body body, const IterRange& T);

// Right fixpoint, then left fixpoint: trailing merges first so leading
// diagonals do not survive to occupy a tick of their own.
Body compact_bidir(LoopProgram& p, Body body, const IterRange& T);

// Earliest-tick assignment where every pair of instructions that can touch
// a common qubit at some iteration of T is ordered.
std::vector<i64> asap_ticks(const Body& body, const IterRange& T);
i64 asap_depth(const Body& body, const IterRange& T);

// Index of the builtin definition, added to the program if missing.
int ensure_builtin_def(LoopProgram& p, const std::string& name);

}  // namespace qlsp
