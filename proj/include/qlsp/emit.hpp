// Turns case plans into the explicitly parallel output program: boundary
// instance blocks (compacted and tick-grouped), the kernel loop with one
// parallel block per slot, residue-dispatch guards for unknown ranges, and
// composite gate definitions for merged products.
#pragma once

#include "qlsp/pipeline.hpp"

namespace qlsp {

struct EmitResult {
  OutProgram out;
  // Depths of the emitted boundary blocks (single known case only).
  i64 pre_depth = 0;
  i64 post_depth = 0;
  i64 qsp_iters = 0;
};

EmitResult emit_pipelined(LoopProgram& p, const std::vector<CasePlan>& plans,
                          const CompileOptions& opt);

// The source loop with each iteration laid out as compacted parallel rows.
OutProgram emit_kernel_asap(LoopProgram& p, bool compact);

// Every iteration instantiated and compacted into one straight-line block
// of parallel rows (known ranges only).
OutProgram emit_unrolled_asap(LoopProgram& p, bool compact);

}  // namespace qlsp
