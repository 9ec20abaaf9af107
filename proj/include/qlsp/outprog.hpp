// The emitted explicitly parallel language: same header syntax as the input
// language plus parallel blocks, guard dispatch, and general arithmetic in
// index expressions. Statements are printable, reparsable, and evaluable to
// a flat gate sequence for equivalence checking.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "qlsp/ast.hpp"
#include "qlsp/expr.hpp"
#include "qlsp/gates.hpp"

namespace qlsp {

struct OutGateDef {
  std::string name;
  i64 length = 1;
  GateHint hint = GateHint::Matrix;
  std::vector<Mat2> mats;
  // Composite gates (products created by merging) keep their factorization
  // for evaluation: element j multiplies gates[f.def][f.idx(j)] in order.
  // This table is program metadata, not part of the printed text (the
  // printed definition is the hint), so reparsing drops it.
  std::vector<Factor> factors;
};

struct OutOp {
  bool cz = false;
  int gate = -1;  // SQ: index into gates
  Ex gate_idx;    // SQ: element selector
  int qa = 0;
  Ex ia;
  int qb = 0;  // CZ second operand
  Ex ib;
};

enum class Cmp { Eq, Ne, Lt, Le, Gt, Ge };

struct OutStmt;

struct OutCase {
  bool otherwise = false;
  Ex lhs, rhs;  // when !otherwise
  Cmp cmp = Cmp::Eq;
  std::vector<OutStmt> body;
};

struct OutStmt {
  enum class Kind { Op, Parallel, For, Guard } kind = Kind::Op;
  OutOp op;                   // Op
  std::vector<OutOp> par;     // Parallel
  std::string var;            // For
  Ex lo, hi;                  // For
  std::vector<OutStmt> body;  // For
  std::vector<OutCase> cases; // Guard
};

struct OutProgram {
  std::vector<QubitArray> qubits;
  std::vector<OutGateDef> gates;
  std::vector<OutStmt> stmts;

  int qubit_base(int array) const;
  i64 total_qubits() const;
};

std::string out_print(const OutProgram& p);
OutProgram out_parse(const std::string& text);  // throws ParseError
// Structural equality of the printed form (headers by hint, statements by
// expression tree; composite factor tables are ignored).
bool out_equal(const OutProgram& a, const OutProgram& b);

// --- evaluation ----------------------------------------------------------

// One multiplicand of a concrete gate application: either an explicit
// matrix or a symbolic gate-array element identified by definition name.
struct CFactor {
  bool known = true;
  Mat2 m;
  std::string def;
  i64 elem = 0;
};

struct ConcreteGate {
  bool cz = false;
  i64 q1 = 0, q2 = 0;  // flat qubit indices
  std::vector<CFactor> f;
};

// Flatten to the executed gate sequence with the given values for free
// range variables. Guards pick the first satisfied case; for loops with
// lo > hi run zero times. Throws on out-of-range indices.
std::vector<ConcreteGate> out_eval(const OutProgram& p,
                                   const std::map<std::string, i64>& env);

}  // namespace qlsp
