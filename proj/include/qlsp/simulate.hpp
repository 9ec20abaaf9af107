// State-vector simulation and deterministic random bindings for symbolic
// gate arrays. Used by the equivalence verifier and semantics property tests.
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "qlsp/ast.hpp"
#include "qlsp/outprog.hpp"

namespace qlsp {

// Resolves symbolic gate-array elements to concrete unitaries, respecting
// declared structure: Diag -> random z-rotation, Anti -> X times a random
// z-rotation, Unknown -> Haar-ish random unitary. Deterministic per
// (seed, definition name, element), independent of query order.
class Binder {
 public:
  Binder(const std::vector<GateDef>& defs, uint64_t seed);
  Mat2 resolve(const CFactor& f) const;
  Mat2 gate_of(const ConcreteGate& g) const;  // full product, SQ only

 private:
  std::map<std::string, GateHint> hints_;
  uint64_t seed_;
};

class StateVec {
 public:
  explicit StateVec(int nqubits);
  int qubits() const { return nq_; }
  void set_basis(uint64_t index);
  void randomize(std::mt19937_64& rng);
  void apply1(i64 q, const Mat2& m);
  void apply_cz(i64 q1, i64 q2);
  void apply(const std::vector<ConcreteGate>& gates, const Binder& b);
  // Largest amplitude difference after aligning global phase.
  double diff_up_to_phase(const StateVec& other) const;

 private:
  int nq_;
  std::vector<cx> amp_;
};

// Deterministic standard normal from raw engine output (platform-stable,
// unlike std::normal_distribution).
double gaussian(std::mt19937_64& rng);

// Flatten an input program at concrete loop bounds [m, n].
std::vector<ConcreteGate> program_eval(const LoopProgram& p, i64 m, i64 n);

// Flatten a straight-line body (no loop variable; refs must have slope 0).
std::vector<ConcreteGate> body_eval(const LoopProgram& p, const Body& body);

}  // namespace qlsp
