// Brute-force semantic check: execute the source loop and the emitted
// program on random states with random hint-respecting gate bindings and
// compare state vectors up to global phase.
#pragma once

#include <cstdint>
#include <string>

#include "qlsp/ast.hpp"
#include "qlsp/outprog.hpp"

namespace qlsp {

struct VerifyOptions {
  int max_qubits = 20;  // refuse larger state vectors
  int trials = 8;       // (binding, state) pairs per checked range
  uint64_t seed = 1;
  double tol = 1e-7;
  i64 max_trips = 8;  // unknown ranges: largest sampled trip count
};

struct VerifyResult {
  bool ran = false;  // false: nothing checked (see detail for why)
  bool ok = true;
  double max_diff = 0.0;
  i64 ranges_checked = 0;
  std::string detail;
};

// Known ranges check the program's own bounds; unknown ranges sample small
// concrete (m, n) pairs, skipping those the source itself cannot execute
// (indices out of bounds).
VerifyResult verify_equivalence(const LoopProgram& p, const OutProgram& out,
                                const VerifyOptions& opt = {});

}  // namespace qlsp
