#include "qlsp/ast.hpp"

#include <sstream>

#include "qlsp/alias.hpp"

namespace qlsp {

MatClass GateDef::cls() const {
  switch (hint) {
    case GateHint::Diag: return MatClass::Diagonal;
    case GateHint::Anti: return MatClass::AntiDiagonal;
    case GateHint::Unknown: return MatClass::General;
    case GateHint::Matrix: break;
  }
  MatClass c = classify(mats.at(0));
  for (const Mat2& m : mats)
    if (classify(m) != c) return MatClass::General;
  return c;
}

i64 LoopProgram::total_qubits() const {
  i64 n = 0;
  for (const auto& q : qubits) n += q.size;
  return n;
}

int LoopProgram::qubit_base(int array) const {
  int base = 0;
  for (int i = 0; i < array; ++i) base += (int)qubits[i].size;
  return base;
}

MatClass gate_class(const LoopProgram& p, const GateVal& g) {
  if (auto m = gate_matrix(p, g)) return classify(*m);
  MatClass c = MatClass::Diagonal;  // identity of the composition monoid
  for (const Factor& f : g.factors)
    c = compose_class(c, p.gates[f.def].cls());
  return c;
}

std::optional<Mat2> gate_matrix(const LoopProgram& p, const GateVal& g) {
  Mat2 acc = Mat2::identity();
  for (const Factor& f : g.factors) {
    const GateDef& d = p.gates[f.def];
    if (d.hint != GateHint::Matrix) return std::nullopt;
    i64 elem;
    if (f.idx.k == 0)
      elem = f.idx.b;
    else if (d.length == 1)
      elem = 0;
    else
      return std::nullopt;
    if (elem < 0 || elem >= (i64)d.mats.size()) return std::nullopt;
    acc = d.mats[elem].mul(acc);  // f applied after what came before
  }
  return acc;
}

GateVal gate_merge(const GateVal& first, const GateVal& then) {
  GateVal out = first;
  out.factors.insert(out.factors.end(), then.factors.begin(),
                     then.factors.end());
  return out;
}

Instr instr_shifted(const Instr& in, i64 d) {
  Instr out = in;
  out.a.idx = out.a.idx.shifted(d);
  out.b.idx = out.b.idx.shifted(d);
  for (Factor& f : out.g.factors) f.idx = f.idx.shifted(d);
  return out;
}

Instr instr_scaled(const Instr& in, i64 s, i64 d) {
  Instr out = in;
  out.a.idx = out.a.idx.scaled(s, d);
  out.b.idx = out.b.idx.scaled(s, d);
  for (Factor& f : out.g.factors) f.idx = f.idx.scaled(s, d);
  return out;
}

std::vector<Ref> instr_refs(const Instr& in) {
  if (in.cz) return {in.a, in.b};
  return {in.a};
}

bool instrs_alias(const Instr& x, const Instr& y, const IterRange& T) {
  for (const Ref& rx : instr_refs(x))
    for (const Ref& ry : instr_refs(y))
      if (rx.array == ry.array && in_loop_alias(rx.idx, ry.idx, T))
        return true;
  return false;
}

namespace {
std::string lin_str(const Lin& l, const std::string& var) {
  return ex_print(ex_lin(l.k, var, l.b));
}
}  // namespace

std::string instr_str(const LoopProgram& p, const Instr& in) {
  std::ostringstream os;
  if (in.cz) {
    os << "CZ " << p.qubits[in.a.array].name << "[" << lin_str(in.a.idx, p.var)
       << "], " << p.qubits[in.b.array].name << "[" << lin_str(in.b.idx, p.var)
       << "]";
    return os.str();
  }
  os << "SQ(";
  for (size_t i = 0; i < in.g.factors.size(); ++i) {
    const Factor& f = in.g.factors[i];
    if (i) os << "*";
    os << p.gates[f.def].name;
    if (p.gates[f.def].length != 1 || f.idx != Lin{0, 0})
      os << "[" << lin_str(f.idx, p.var) << "]";
  }
  os << ") " << p.qubits[in.a.array].name << "[" << lin_str(in.a.idx, p.var)
     << "]";
  return os.str();
}

}  // namespace qlsp
