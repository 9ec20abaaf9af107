#include "qlsp/outprog.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "lexer.hpp"

namespace qlsp {

int OutProgram::qubit_base(int array) const {
  int base = 0;
  for (int i = 0; i < array; ++i) base += (int)qubits[i].size;
  return base;
}

i64 OutProgram::total_qubits() const {
  i64 n = 0;
  for (const auto& q : qubits) n += q.size;
  return n;
}

// --- printing -------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_matrix(std::ostringstream& os, const Mat2& m) {
  const cx* e[4] = {&m.a, &m.b, &m.c, &m.d};
  os << "(";
  for (int i = 0; i < 4; ++i) {
    if (i) os << ", ";
    os << "(" << fmt_double(e[i]->real()) << ", " << fmt_double(e[i]->imag())
       << ")";
  }
  os << ")";
}

const char* cmp_str(Cmp c) {
  switch (c) {
    case Cmp::Eq: return "==";
    case Cmp::Ne: return "!=";
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
  }
  return "?";
}

void print_op(std::ostringstream& os, const OutProgram& p, const OutOp& op,
              const std::string& ind) {
  os << ind;
  if (op.cz) {
    os << "CZ " << p.qubits[op.qa].name << "[" << ex_print(op.ia) << "], "
       << p.qubits[op.qb].name << "[" << ex_print(op.ib) << "];\n";
    return;
  }
  const OutGateDef& g = p.gates[op.gate];
  os << "SQ(" << g.name;
  bool bare = g.length == 1 && op.gate_idx->op == ExOp::Num &&
              op.gate_idx->num == 0;
  if (!bare) os << "[" << ex_print(op.gate_idx) << "]";
  os << ") " << p.qubits[op.qa].name << "[" << ex_print(op.ia) << "];\n";
}

void print_stmt(std::ostringstream& os, const OutProgram& p, const OutStmt& s,
                int depth) {
  std::string ind(2 * depth, ' ');
  switch (s.kind) {
    case OutStmt::Kind::Op:
      print_op(os, p, s.op, ind);
      break;
    case OutStmt::Kind::Parallel:
      os << ind << "parallel {\n";
      for (const OutOp& op : s.par) print_op(os, p, op, ind + "  ");
      os << ind << "}\n";
      break;
    case OutStmt::Kind::For:
      os << ind << "for " << s.var << " in " << ex_print(s.lo) << " to "
         << ex_print(s.hi) << " {\n";
      for (const OutStmt& c : s.body) print_stmt(os, p, c, depth + 1);
      os << ind << "}\n";
      break;
    case OutStmt::Kind::Guard:
      os << ind << "guard {\n";
      for (const OutCase& c : s.cases) {
        os << ind << "  ";
        if (c.otherwise)
          os << "otherwise";
        else
          os << ex_print(c.lhs) << " " << cmp_str(c.cmp) << " "
             << ex_print(c.rhs);
        os << " => {\n";
        for (const OutStmt& b : c.body) print_stmt(os, p, b, depth + 2);
        os << ind << "  }\n";
      }
      os << ind << "}\n";
      break;
  }
}

}  // namespace

std::string out_print(const OutProgram& p) {
  std::ostringstream os;
  for (const auto& q : p.qubits)
    os << "qubit " << q.name << "[" << q.size << "];\n";
  for (const auto& g : p.gates) {
    if (g.hint == GateHint::Matrix && builtin_gate(g.name)) continue;
    os << "defgate " << g.name << "[" << g.length << "] = ";
    switch (g.hint) {
      case GateHint::Diag: os << "RZ"; break;
      case GateHint::Anti: os << "RZ+"; break;
      case GateHint::Unknown: os << "Unknown"; break;
      case GateHint::Matrix: {
        os << "[";
        for (size_t i = 0; i < g.mats.size(); ++i) {
          if (i) os << ", ";
          print_matrix(os, g.mats[i]);
        }
        os << "]";
        break;
      }
    }
    os << ";\n";
  }
  for (const OutStmt& s : p.stmts) print_stmt(os, p, s, 0);
  return os.str();
}

// --- parsing --------------------------------------------------------------

namespace {

using lex::Stream;
using lex::Tok;

struct OutBuilder {
  OutProgram prog;
  std::map<std::string, int> qubit_ids;
  std::map<std::string, int> gate_ids;

  int qubit(Stream& ts, const std::string& name) {
    auto it = qubit_ids.find(name);
    if (it == qubit_ids.end()) ts.fail("undeclared qubit array '" + name + "'");
    return it->second;
  }

  int gate(Stream& ts, const std::string& name) {
    auto it = gate_ids.find(name);
    if (it != gate_ids.end()) return it->second;
    if (auto m = builtin_gate(name)) {
      OutGateDef d;
      d.name = name;
      d.length = 1;
      d.hint = GateHint::Matrix;
      d.mats = {*m};
      gate_ids[name] = (int)prog.gates.size();
      prog.gates.push_back(std::move(d));
      return gate_ids[name];
    }
    ts.fail("unknown gate '" + name + "'");
  }
};

Ex parse_ex(Stream& ts);

Ex parse_ex_atom(Stream& ts) {
  if (ts.accept("-")) {
    const Tok& t = ts.peek();
    if (t.k == Tok::K::Int) return ex_num(-ts.next().i);
    return ex_sub(ex_num(0), parse_ex_atom(ts));
  }
  if (ts.accept("(")) {
    Ex e = parse_ex(ts);
    ts.expect(")", "expression");
    return e;
  }
  const Tok& t = ts.peek();
  if (t.k == Tok::K::Int) return ex_num(ts.next().i);
  if (t.k == Tok::K::Ident) return ex_var(ts.next().s);
  ts.fail("expected expression");
}

Ex parse_ex_term(Stream& ts) {
  Ex e = parse_ex_atom(ts);
  while (ts.at("*") || ts.at("/") || ts.at("%")) {
    std::string op = ts.next().s;
    Ex r = parse_ex_atom(ts);
    e = op == "*" ? ex_mul(e, r) : op == "/" ? ex_div(e, r) : ex_mod(e, r);
  }
  return e;
}

Ex parse_ex(Stream& ts) {
  Ex e = parse_ex_term(ts);
  while (ts.at("+") || ts.at("-")) {
    std::string op = ts.next().s;
    Ex r = parse_ex_term(ts);
    e = op == "+" ? ex_add(e, r) : ex_sub(e, r);
  }
  return e;
}

Mat2 parse_out_matrix(Stream& ts) {
  ts.expect("(", "matrix");
  cx e[4];
  for (int i = 0; i < 4; ++i) {
    if (i) ts.expect(",", "matrix");
    ts.expect("(", "matrix entry");
    double re = ts.expect_number("matrix entry");
    ts.expect(",", "matrix entry");
    double im = ts.expect_number("matrix entry");
    ts.expect(")", "matrix entry");
    e[i] = cx(re, im);
  }
  ts.expect(")", "matrix");
  return {e[0], e[1], e[2], e[3]};
}

void parse_out_decls(Stream& ts, OutBuilder& b) {
  while (ts.at("qubit") || ts.at("defgate")) {
    if (ts.accept("qubit")) {
      QubitArray q;
      q.name = ts.expect_ident("qubit declaration");
      ts.expect("[", "qubit declaration");
      q.size = ts.expect_int("qubit declaration");
      ts.expect("]", "qubit declaration");
      ts.expect(";", "qubit declaration");
      if (b.qubit_ids.count(q.name))
        ts.fail("duplicate qubit array '" + q.name + "'");
      b.qubit_ids[q.name] = (int)b.prog.qubits.size();
      b.prog.qubits.push_back(std::move(q));
      continue;
    }
    ts.expect("defgate", "declaration");
    OutGateDef d;
    d.name = ts.expect_ident("gate declaration");
    if (builtin_gate(d.name)) ts.fail("'" + d.name + "' is a builtin gate name");
    ts.expect("[", "gate declaration");
    d.length = ts.expect_int("gate declaration");
    ts.expect("]", "gate declaration");
    ts.expect("=", "gate declaration");
    if (ts.accept("Unknown")) {
      d.hint = GateHint::Unknown;
    } else if (ts.accept("RZ")) {
      d.hint = ts.accept("+") ? GateHint::Anti : GateHint::Diag;
    } else if (ts.at("[")) {
      ts.next();
      d.hint = GateHint::Matrix;
      d.mats.push_back(parse_out_matrix(ts));
      while (ts.accept(",")) d.mats.push_back(parse_out_matrix(ts));
      ts.expect("]", "gate declaration");
      if ((i64)d.mats.size() != d.length)
        ts.fail("matrix count does not match gate length");
    } else {
      std::string name = ts.expect_ident("gate declaration");
      auto m = builtin_gate(name);
      if (!m) ts.fail("unknown gate '" + name + "'");
      d.hint = GateHint::Matrix;
      d.mats.assign(d.length, *m);
    }
    ts.expect(";", "gate declaration");
    if (b.gate_ids.count(d.name)) ts.fail("duplicate gate '" + d.name + "'");
    b.gate_ids[d.name] = (int)b.prog.gates.size();
    b.prog.gates.push_back(std::move(d));
  }
}

OutOp parse_out_op(Stream& ts, OutBuilder& b) {
  OutOp op;
  if (ts.accept("CZ")) {
    op.cz = true;
    op.qa = b.qubit(ts, ts.expect_ident("CZ operand"));
    ts.expect("[", "CZ operand");
    op.ia = parse_ex(ts);
    ts.expect("]", "CZ operand");
    ts.expect(",", "CZ");
    op.qb = b.qubit(ts, ts.expect_ident("CZ operand"));
    ts.expect("[", "CZ operand");
    op.ib = parse_ex(ts);
    ts.expect("]", "CZ operand");
  } else {
    ts.expect("SQ", "operation");
    ts.expect("(", "SQ");
    op.gate = b.gate(ts, ts.expect_ident("gate reference"));
    if (ts.accept("[")) {
      op.gate_idx = parse_ex(ts);
      ts.expect("]", "gate reference");
    } else {
      op.gate_idx = ex_num(0);
    }
    ts.expect(")", "SQ");
    op.qa = b.qubit(ts, ts.expect_ident("SQ target"));
    ts.expect("[", "SQ target");
    op.ia = parse_ex(ts);
    ts.expect("]", "SQ target");
  }
  ts.expect(";", "operation");
  return op;
}

std::vector<OutStmt> parse_out_stmts(Stream& ts, OutBuilder& b);

OutStmt parse_out_stmt(Stream& ts, OutBuilder& b) {
  OutStmt s;
  if (ts.accept("parallel")) {
    s.kind = OutStmt::Kind::Parallel;
    ts.expect("{", "parallel block");
    while (ts.at("SQ") || ts.at("CZ")) s.par.push_back(parse_out_op(ts, b));
    ts.expect("}", "parallel block");
    return s;
  }
  if (ts.accept("for")) {
    s.kind = OutStmt::Kind::For;
    s.var = ts.expect_ident("for loop");
    ts.expect("in", "for loop");
    s.lo = parse_ex(ts);
    ts.expect("to", "for loop");
    s.hi = parse_ex(ts);
    ts.expect("{", "for loop");
    s.body = parse_out_stmts(ts, b);
    ts.expect("}", "for loop");
    return s;
  }
  if (ts.accept("guard")) {
    s.kind = OutStmt::Kind::Guard;
    ts.expect("{", "guard");
    while (!ts.at("}")) {
      OutCase c;
      if (ts.accept("otherwise")) {
        c.otherwise = true;
      } else {
        c.lhs = parse_ex(ts);
        static const std::pair<const char*, Cmp> cmps[] = {
            {"==", Cmp::Eq}, {"!=", Cmp::Ne}, {"<=", Cmp::Le},
            {">=", Cmp::Ge}, {"<", Cmp::Lt},  {">", Cmp::Gt}};
        bool found = false;
        for (auto& [sym, cmp] : cmps)
          if (ts.accept(sym)) {
            c.cmp = cmp;
            found = true;
            break;
          }
        if (!found) ts.fail("expected comparison operator in guard");
        c.rhs = parse_ex(ts);
      }
      ts.expect("=>", "guard case");
      ts.expect("{", "guard case");
      c.body = parse_out_stmts(ts, b);
      ts.expect("}", "guard case");
      s.cases.push_back(std::move(c));
    }
    ts.expect("}", "guard");
    return s;
  }
  s.kind = OutStmt::Kind::Op;
  s.op = parse_out_op(ts, b);
  return s;
}

std::vector<OutStmt> parse_out_stmts(Stream& ts, OutBuilder& b) {
  std::vector<OutStmt> out;
  while (ts.at("SQ") || ts.at("CZ") || ts.at("parallel") || ts.at("for") ||
         ts.at("guard"))
    out.push_back(parse_out_stmt(ts, b));
  return out;
}

}  // namespace

OutProgram out_parse(const std::string& text) {
  Stream ts(text);
  OutBuilder b;
  parse_out_decls(ts, b);
  b.prog.stmts = parse_out_stmts(ts, b);
  if (ts.peek().k != Tok::K::Eof) ts.fail("unexpected trailing input");
  return b.prog;
}

// --- equality -------------------------------------------------------------

namespace {

bool mats_equal(const std::vector<Mat2>& a, const std::vector<Mat2>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].a != b[i].a || a[i].b != b[i].b || a[i].c != b[i].c ||
        a[i].d != b[i].d)
      return false;
  }
  return true;
}

bool ops_equal(const OutProgram& pa, const OutOp& a, const OutProgram& pb,
               const OutOp& b) {
  if (a.cz != b.cz) return false;
  if (pa.qubits[a.qa].name != pb.qubits[b.qa].name) return false;
  if (!ex_equal(a.ia, b.ia)) return false;
  if (a.cz) {
    return pa.qubits[a.qb].name == pb.qubits[b.qb].name &&
           ex_equal(a.ib, b.ib);
  }
  return pa.gates[a.gate].name == pb.gates[b.gate].name &&
         ex_equal(a.gate_idx, b.gate_idx);
}

bool stmts_equal(const OutProgram& pa, const std::vector<OutStmt>& a,
                 const OutProgram& pb, const std::vector<OutStmt>& b);

bool stmt_equal(const OutProgram& pa, const OutStmt& a, const OutProgram& pb,
                const OutStmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case OutStmt::Kind::Op:
      return ops_equal(pa, a.op, pb, b.op);
    case OutStmt::Kind::Parallel: {
      if (a.par.size() != b.par.size()) return false;
      for (size_t i = 0; i < a.par.size(); ++i)
        if (!ops_equal(pa, a.par[i], pb, b.par[i])) return false;
      return true;
    }
    case OutStmt::Kind::For:
      return a.var == b.var && ex_equal(a.lo, b.lo) && ex_equal(a.hi, b.hi) &&
             stmts_equal(pa, a.body, pb, b.body);
    case OutStmt::Kind::Guard: {
      if (a.cases.size() != b.cases.size()) return false;
      for (size_t i = 0; i < a.cases.size(); ++i) {
        const OutCase& x = a.cases[i];
        const OutCase& y = b.cases[i];
        if (x.otherwise != y.otherwise) return false;
        if (!x.otherwise &&
            (x.cmp != y.cmp || !ex_equal(x.lhs, y.lhs) || !ex_equal(x.rhs, y.rhs)))
          return false;
        if (!stmts_equal(pa, x.body, pb, y.body)) return false;
      }
      return true;
    }
  }
  return false;
}

bool stmts_equal(const OutProgram& pa, const std::vector<OutStmt>& a,
                 const OutProgram& pb, const std::vector<OutStmt>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!stmt_equal(pa, a[i], pb, b[i])) return false;
  return true;
}

}  // namespace

bool out_equal(const OutProgram& a, const OutProgram& b) {
  if (a.qubits.size() != b.qubits.size()) return false;
  for (size_t i = 0; i < a.qubits.size(); ++i)
    if (a.qubits[i].name != b.qubits[i].name ||
        a.qubits[i].size != b.qubits[i].size)
      return false;
  // Gate definitions by name; builtins are implicit and may differ in
  // presence depending on use.
  std::map<std::string, const OutGateDef*> ga, gb;
  for (const auto& g : a.gates)
    if (!(g.hint == GateHint::Matrix && builtin_gate(g.name))) ga[g.name] = &g;
  for (const auto& g : b.gates)
    if (!(g.hint == GateHint::Matrix && builtin_gate(g.name))) gb[g.name] = &g;
  if (ga.size() != gb.size()) return false;
  for (auto& [name, g] : ga) {
    auto it = gb.find(name);
    if (it == gb.end()) return false;
    const OutGateDef* h = it->second;
    if (g->length != h->length || g->hint != h->hint) return false;
    if (g->hint == GateHint::Matrix && !mats_equal(g->mats, h->mats))
      return false;
  }
  return stmts_equal(a, a.stmts, b, b.stmts);
}

// --- evaluation -----------------------------------------------------------

namespace {

void eval_op(const OutProgram& p, const OutOp& op,
             const std::map<std::string, i64>& env,
             std::vector<ConcreteGate>& out) {
  auto qubit_at = [&](int array, const Ex& idx) -> i64 {
    i64 v = ex_eval(idx, env);
    const QubitArray& q = p.qubits[array];
    if (v < 0 || v >= q.size)
      throw std::runtime_error("qubit index " + std::to_string(v) +
                               " outside " + q.name);
    return p.qubit_base(array) + v;
  };
  ConcreteGate g;
  g.cz = op.cz;
  g.q1 = qubit_at(op.qa, op.ia);
  if (op.cz) {
    g.q2 = qubit_at(op.qb, op.ib);
    if (g.q1 == g.q2) throw std::runtime_error("CZ applied to a single qubit");
    out.push_back(std::move(g));
    return;
  }
  const OutGateDef& d = p.gates[op.gate];
  i64 elem = ex_eval(op.gate_idx, env);
  // Factor-table gates are families indexed by the loop counter; their
  // declared length is nominal and validity comes from the factor accesses.
  if (d.factors.empty() && (elem < 0 || elem >= d.length))
    throw std::runtime_error("gate index " + std::to_string(elem) +
                             " outside " + d.name);
  auto push_primitive = [&](const OutGateDef& pd, i64 e) {
    CFactor f;
    if (pd.hint == GateHint::Matrix) {
      f.known = true;
      f.m = pd.mats.at(e);
    } else {
      f.known = false;
      f.def = pd.name;
      f.elem = e;
    }
    g.f.push_back(std::move(f));
  };
  if (!d.factors.empty()) {
    for (const Factor& f : d.factors) {
      const OutGateDef& pd = p.gates[f.def];
      i64 e = f.idx.at(elem);
      if (e < 0 || e >= pd.length)
        throw std::runtime_error("composite factor index outside " + pd.name);
      push_primitive(pd, e);
    }
  } else {
    push_primitive(d, elem);
  }
  out.push_back(std::move(g));
}

bool cmp_eval(Cmp c, i64 a, i64 b) {
  switch (c) {
    case Cmp::Eq: return a == b;
    case Cmp::Ne: return a != b;
    case Cmp::Lt: return a < b;
    case Cmp::Le: return a <= b;
    case Cmp::Gt: return a > b;
    case Cmp::Ge: return a >= b;
  }
  return false;
}

void eval_stmts(const OutProgram& p, const std::vector<OutStmt>& stmts,
                std::map<std::string, i64>& env,
                std::vector<ConcreteGate>& out) {
  for (const OutStmt& s : stmts) {
    switch (s.kind) {
      case OutStmt::Kind::Op:
        eval_op(p, s.op, env, out);
        break;
      case OutStmt::Kind::Parallel:
        for (const OutOp& op : s.par) eval_op(p, op, env, out);
        break;
      case OutStmt::Kind::For: {
        i64 lo = ex_eval(s.lo, env);
        i64 hi = ex_eval(s.hi, env);
        bool shadowed = env.count(s.var);
        i64 saved = shadowed ? env[s.var] : 0;
        for (i64 v = lo; v <= hi; ++v) {
          env[s.var] = v;
          eval_stmts(p, s.body, env, out);
        }
        if (shadowed)
          env[s.var] = saved;
        else
          env.erase(s.var);
        break;
      }
      case OutStmt::Kind::Guard: {
        for (const OutCase& c : s.cases) {
          if (c.otherwise ||
              cmp_eval(c.cmp, ex_eval(c.lhs, env), ex_eval(c.rhs, env))) {
            eval_stmts(p, c.body, env, out);
            break;
          }
        }
        break;
      }
    }
  }
}

}  // namespace

std::vector<ConcreteGate> out_eval(const OutProgram& p,
                                   const std::map<std::string, i64>& env) {
  std::vector<ConcreteGate> out;
  std::map<std::string, i64> e = env;
  eval_stmts(p, p.stmts, e, out);
  return out;
}

}  // namespace qlsp
