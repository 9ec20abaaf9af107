// Loop-level transformations: unrolling into residue cases and loop
// rotation (peeling leading instructions into a prologue so they can merge
// with the following iteration's work).
#pragma once

#include "qlsp/ast.hpp"

namespace qlsp {

// An instruction pinned to an iteration near one edge of the loop range:
// iteration = range start + off (prologues) or final range end + off
// (epilogues, off >= 1). The instruction's indices are still in loop-
// variable form and get evaluated at that iteration when emitted.
enum class Anchor { Start, End };
struct EdgeInstr {
  Instr in;
  Anchor anchor = Anchor::Start;
  i64 off = 0;
};

struct Rotated {
  Body body;                       // final, left-compacted
  std::vector<EdgeInstr> prologue; // emission order
  std::vector<EdgeInstr> epilogue; // emission order
  i64 steps = 0;                   // loop end shrank by this many iterations
  IterRange range;                 // post-rotation iteration range
};

// Rotate until no unrotated instruction is the destination of a
// distance-1 merge or cancellation opportunity. Compacts on entry and
// after every step. Known ranges stop rotating when down to one iteration.
Rotated rotate(LoopProgram& p, Body body, IterRange range);

// One residue class of an unrolled loop: iterations j of the unrolled
// counter run the original iterations C*j + q + c for c in [0, C).
struct UnrollCase {
  i64 q = 0;       // residue of the original start modulo C
  Body body;       // C copies with slopes scaled by C
  IterRange jrange;  // known ranges only; unknown cases use all of Z
  i64 jstart = 0;  // known: first j value (= (m - q) / C)
  Body remainder;  // known: leftover iterations as straight-line code
};

struct Unrolled {
  i64 C = 1;
  // Known range: exactly one case (the actual residue). Unknown range: C
  // cases for q = 0..C-1, selected by a guard on the start bound.
  std::vector<UnrollCase> cases;
};

Unrolled unroll(const LoopProgram& p, const Body& body, const IterRange& range,
                i64 C);

// Instantiate at a concrete iteration (all indices become constants).
Instr instr_at(const Instr& in, i64 iteration);

}  // namespace qlsp
