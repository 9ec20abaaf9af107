// End-to-end compilation: compaction, unrolling into residue cases,
// rotation, two modulo-scheduling rounds (placement, then legalization of
// the tick-ordered kernel with compensating Zs), and fallback when the
// pipelined kernel would not beat the plainly compacted loop.
#pragma once

#include "qlsp/looptx.hpp"
#include "qlsp/outprog.hpp"
#include "qlsp/parse.hpp"
#include "qlsp/schedule.hpp"

namespace qlsp {

enum class EmitMode { Pipelined, KernelAsap, UnrolledAsap };

struct CompileOptions {
  i64 unroll = 2;
  bool compact = true;  // master switch for compaction (and thus rotation)
  i64 max_ii = 0;       // 0 = body length
  EmitMode emit = EmitMode::Pipelined;
  bool dump_qdg = false;
  bool dump_table = false;
};

struct Stats {
  i64 asap = 0;          // depth of one compacted source iteration
  i64 c_asap = 0;        // depth of one compacted unrolled iteration
  i64 kernel_depth = 0;  // ticks per kernel iteration (final II)
  i64 pre_depth = 0;     // emitted prologue depth
  i64 post_depth = 0;    // emitted epilogue (+ leftover iterations) depth
  i64 iters = 0;         // source iteration count
  i64 kernel_asap_total = 0;  // asap * iters
  i64 unroll_total = 0;       // depth of the fully unrolled, compacted loop
  i64 qsp_iters = 0;          // kernel iteration count
  i64 qsp_total = 0;          // pre + kernel_depth * qsp_iters + post
};

// One scheduled instruction. Refs live in the round's iteration space; at
// issue iteration k the instance for iteration k - p runs in slot q.
// lpad/hpad shrink the validity range of compensating Zs (the Z exists only
// where both crossing endpoints do).
struct PipeEntry {
  Instr in;
  i64 t = 0, p = 0, q = 0;
  i64 c = 0;  // original in-iteration order (merge and tie-breaking key)
  i64 p_prev = 0;     // stage carried over from the previous round
  i64 lpad = 0, hpad = 0;
};

struct CasePlan {
  UnrollCase uc;
  bool fallback = false;  // emit the compacted source loop instead
  Rotated rot;
  i64 c_asap = 0;
  // Round 1 over the rotated case body; window [S + wlo, E + whi] where
  // S/E are the (post-rotation) case bounds.
  std::vector<PipeEntry> e1;
  i64 wlo = 0, whi = 0;
  // Round 2 over the tick-ordered kernel; window offsets relative to the
  // round-1 window bounds.
  std::vector<PipeEntry> e2;
  i64 w2lo = 0, w2hi = 0;
  i64 ii = 0;      // final initiation interval
  i64 jmin = 1;    // case iterations needed for a nonempty kernel
};

struct CompileResult {
  OutProgram out;
  Stats stats;
  bool have_stats = false;  // known range only
  bool fallback = false;    // any case fell back
  i64 retries = 0;          // scheduling retries, all rounds and cases
  i64 retry_cap = 0;        // sum of the per-run caps actually in force
  std::string qdg_dump;
  std::string table_dump;
};

CompileResult compile(LoopProgram p, const CompileOptions& opt);

}  // namespace qlsp
