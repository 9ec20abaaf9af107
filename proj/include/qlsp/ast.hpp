// Input program representation: a header of qubit arrays and gate-array
// definitions, straight-line code, and one for loop whose body contains
// one-qubit gate applications (SQ) and controlled-Z gates (CZ) with linear
// index expressions in the loop counter.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlsp/expr.hpp"
#include "qlsp/gates.hpp"

namespace qlsp {

struct QubitArray {
  std::string name;
  i64 size = 0;
};

// How a gate array was declared. Matrix carries explicit per-element
// unitaries; Diag/Anti/Unknown are symbolic families whose elements are only
// known to be diagonal / antidiagonal / arbitrary.
enum class GateHint { Matrix, Diag, Anti, Unknown };

struct GateDef {
  std::string name;
  i64 length = 1;
  GateHint hint = GateHint::Matrix;
  std::vector<Mat2> mats;  // hint == Matrix: one entry per element

  // Classification that is valid for every element.
  MatClass cls() const;
};

// One multiplicand of a (possibly merged) one-qubit gate: element idx(i) of
// gate array `def` at loop iteration i.
struct Factor {
  int def = 0;
  Lin idx;
  bool operator==(const Factor&) const = default;
};

// A one-qubit gate as a product of factors, first-applied first. Merging
// two gates concatenates factor lists.
struct GateVal {
  std::vector<Factor> factors;
  bool operator==(const GateVal&) const = default;
};

struct Ref {
  int array = 0;
  Lin idx;
  bool operator==(const Ref&) const = default;
};

struct Instr {
  bool cz = false;
  GateVal g;  // SQ only
  Ref a;      // SQ target, or CZ first operand
  Ref b;      // CZ second operand
  // Set on instructions that have already been rotated; merging into or
  // from a marked instruction clears it, making the result rotatable again.
  bool mark = false;
  bool operator==(const Instr&) const = default;
};

using Body = std::vector<Instr>;

struct LoopProgram {
  std::vector<QubitArray> qubits;
  std::vector<GateDef> gates;
  Body pre;   // straight-line before the loop (refs have slope 0)
  Body body;  // over the loop variable
  Body post;  // straight-line after the loop
  std::string var = "i";
  IterRange range;  // known == false: bounds are the identifiers below
  std::string lo_name;  // range bound names/values as written; used for
  std::string hi_name;  // guard emission when the range is unknown
  bool lo_is_num = true;
  bool hi_is_num = true;

  i64 total_qubits() const;
  int qubit_base(int array) const;  // flat qubit index of array element 0
};

// Product class of a gate value (exact when all factors resolve to
// matrices, conservative group-law composition otherwise).
MatClass gate_class(const LoopProgram& p, const GateVal& g);

// The concrete matrix of a gate value when every factor has an explicit
// matrix and an iteration-independent element (constant index or length-1
// array); nullopt otherwise.
std::optional<Mat2> gate_matrix(const LoopProgram& p, const GateVal& g);

// Append g2's factors to g1 (g1 applied first, then g2).
GateVal gate_merge(const GateVal& first, const GateVal& then);

// Substitute i -> i + d in every index of the instruction.
Instr instr_shifted(const Instr& in, i64 d);
// Substitute i -> s*i + d.
Instr instr_scaled(const Instr& in, i64 s, i64 d);

// Qubit references of an instruction (1 for SQ, 2 for CZ).
std::vector<Ref> instr_refs(const Instr& in);

// Do the two instructions touch a common qubit at some iteration of T
// (each ref pair compared in-loop)?
bool instrs_alias(const Instr& x, const Instr& y, const IterRange& T);

std::string instr_str(const LoopProgram& p, const Instr& in);  // diagnostics

}  // namespace qlsp
