#include "qlsp/parse.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "qlsp/alias.hpp"
#include "lexer.hpp"

namespace qlsp {

namespace {

using lex::Stream;
using lex::Tok;

// Affine integer expression over named variables, used while loop nests are
// still being unrolled. Indices must come out linear in at most the
// pipelined loop's variable.
struct Poly {
  std::map<std::string, i64> co;
  i64 c = 0;
};

Poly poly_num(i64 v) { return {{}, v}; }

Poly poly_add(const Poly& a, const Poly& b, i64 sign) {
  Poly r = a;
  r.c += sign * b.c;
  for (auto& [v, k] : b.co) {
    r.co[v] += sign * k;
    if (r.co[v] == 0) r.co.erase(v);
  }
  return r;
}

Poly poly_mul(Stream& ts, const Poly& a, const Poly& b) {
  if (!a.co.empty() && !b.co.empty())
    ts.fail("index expressions must be linear in the loop variable");
  const Poly& scalar = a.co.empty() ? a : b;
  const Poly& lin = a.co.empty() ? b : a;
  Poly r;
  r.c = scalar.c * lin.c;
  for (auto& [v, k] : lin.co)
    if (i64 kk = k * scalar.c) r.co[v] = kk;
  return r;
}

Poly parse_poly(Stream& ts);

Poly parse_poly_atom(Stream& ts) {
  if (ts.accept("-")) {
    Poly p = parse_poly_atom(ts);
    return poly_add(poly_num(0), p, -1);
  }
  if (ts.accept("(")) {
    Poly p = parse_poly(ts);
    ts.expect(")", "index expression");
    return p;
  }
  const Tok& t = ts.peek();
  if (t.k == Tok::K::Int) return poly_num(ts.next().i);
  if (t.k == Tok::K::Ident) {
    Poly p;
    p.co[ts.next().s] = 1;
    return p;
  }
  ts.fail("expected index expression");
}

Poly parse_poly_term(Stream& ts) {
  Poly p = parse_poly_atom(ts);
  while (ts.at("*")) {
    ts.next();
    p = poly_mul(ts, p, parse_poly_atom(ts));
  }
  return p;
}

Poly parse_poly(Stream& ts) {
  Poly p = parse_poly_term(ts);
  while (ts.at("+") || ts.at("-")) {
    i64 sign = ts.next().s == "+" ? 1 : -1;
    p = poly_add(p, parse_poly_term(ts), sign);
  }
  return p;
}

// --- pre-flattening statement forms --------------------------------------

struct PBound {
  bool is_num = true;
  i64 num = 0;
  std::string name;
};

struct POp {
  bool cz = false;
  std::string gate;
  Poly gidx;
  bool has_gidx = false;
  std::string qa, qb;
  Poly ia, ib;
  int line = 0;
};

struct PStmt;
struct PLoop {
  std::string var;
  PBound lo, hi;
  std::vector<PStmt> body;
  int line = 0;
};

struct PStmt {
  bool is_op = true;
  POp op;
  std::shared_ptr<PLoop> loop;
};

PBound parse_bound(Stream& ts) {
  PBound b;
  if (ts.peek().k == Tok::K::Ident) {
    b.is_num = false;
    b.name = ts.next().s;
  } else {
    b.num = ts.expect_int("loop bound");
  }
  return b;
}

POp parse_op(Stream& ts) {
  POp op;
  op.line = ts.line();
  if (ts.accept("CZ")) {
    op.cz = true;
    op.qa = ts.expect_ident("CZ operand");
    ts.expect("[", "CZ operand");
    op.ia = parse_poly(ts);
    ts.expect("]", "CZ operand");
    ts.expect(",", "CZ");
    op.qb = ts.expect_ident("CZ operand");
    ts.expect("[", "CZ operand");
    op.ib = parse_poly(ts);
    ts.expect("]", "CZ operand");
  } else {
    ts.expect("SQ", "operation");
    ts.expect("(", "SQ");
    op.gate = ts.expect_ident("gate reference");
    if (ts.accept("[")) {
      op.has_gidx = true;
      op.gidx = parse_poly(ts);
      ts.expect("]", "gate reference");
    }
    ts.expect(")", "SQ");
    op.qa = ts.expect_ident("SQ target");
    ts.expect("[", "SQ target");
    op.ia = parse_poly(ts);
    ts.expect("]", "SQ target");
  }
  ts.expect(";", "operation");
  return op;
}

std::vector<PStmt> parse_stmts(Stream& ts);

PStmt parse_stmt(Stream& ts) {
  PStmt s;
  if (ts.at("for")) {
    s.is_op = false;
    s.loop = std::make_shared<PLoop>();
    s.loop->line = ts.line();
    ts.next();
    s.loop->var = ts.expect_ident("for loop");
    ts.expect("in", "for loop");
    s.loop->lo = parse_bound(ts);
    ts.expect("to", "for loop");
    s.loop->hi = parse_bound(ts);
    ts.expect("{", "for loop");
    s.loop->body = parse_stmts(ts);
    ts.expect("}", "for loop");
  } else {
    s.op = parse_op(ts);
  }
  return s;
}

std::vector<PStmt> parse_stmts(Stream& ts) {
  std::vector<PStmt> out;
  while (ts.at("SQ") || ts.at("CZ") || ts.at("for")) out.push_back(parse_stmt(ts));
  return out;
}

// --- declarations ---------------------------------------------------------

Mat2 parse_matrix(Stream& ts) {
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

struct Builder {
  LoopProgram prog;
  std::map<std::string, int> qubit_ids;
  std::map<std::string, int> gate_ids;

  int qubit(const std::string& name, int line) {
    auto it = qubit_ids.find(name);
    if (it == qubit_ids.end())
      throw ParseError("undeclared qubit array '" + name + "'", line);
    return it->second;
  }

  int gate(const std::string& name, int line) {
    auto it = gate_ids.find(name);
    if (it != gate_ids.end()) return it->second;
    if (auto m = builtin_gate(name)) {
      GateDef d;
      d.name = name;
      d.length = 1;
      d.hint = GateHint::Matrix;
      d.mats = {*m};
      gate_ids[name] = (int)prog.gates.size();
      prog.gates.push_back(std::move(d));
      return gate_ids[name];
    }
    throw ParseError("unknown gate '" + name + "'", line);
  }
};

void parse_decls(Stream& ts, Builder& b) {
  while (ts.at("qubit") || ts.at("defgate")) {
    if (ts.accept("qubit")) {
      QubitArray q;
      q.name = ts.expect_ident("qubit declaration");
      ts.expect("[", "qubit declaration");
      q.size = ts.expect_int("qubit declaration");
      ts.expect("]", "qubit declaration");
      ts.expect(";", "qubit declaration");
      if (q.size <= 0) ts.fail("qubit array size must be positive");
      if (b.qubit_ids.count(q.name)) ts.fail("duplicate qubit array '" + q.name + "'");
      b.qubit_ids[q.name] = (int)b.prog.qubits.size();
      b.prog.qubits.push_back(std::move(q));
      continue;
    }
    ts.expect("defgate", "declaration");
    GateDef d;
    d.name = ts.expect_ident("gate declaration");
    if (builtin_gate(d.name))
      ts.fail("'" + d.name + "' is a builtin gate name");
    if (b.gate_ids.count(d.name)) ts.fail("duplicate gate '" + d.name + "'");
    ts.expect("[", "gate declaration");
    d.length = ts.expect_int("gate declaration");
    ts.expect("]", "gate declaration");
    if (d.length <= 0) ts.fail("gate array length must be positive");
    ts.expect("=", "gate declaration");
    if (ts.accept("Unknown")) {
      d.hint = GateHint::Unknown;
    } else if (ts.accept("RZ")) {
      d.hint = ts.accept("+") ? GateHint::Anti : GateHint::Diag;
    } else if (ts.at("[")) {
      ts.next();
      d.hint = GateHint::Matrix;
      d.mats.push_back(parse_matrix(ts));
      while (ts.accept(",")) d.mats.push_back(parse_matrix(ts));
      ts.expect("]", "gate declaration");
      if ((i64)d.mats.size() != d.length)
        ts.fail("gate '" + d.name + "' declares " + std::to_string(d.length) +
                " elements but lists " + std::to_string(d.mats.size()));
    } else {
      std::string name = ts.expect_ident("gate declaration");
      auto m = builtin_gate(name);
      if (!m) ts.fail("unknown gate '" + name + "' in declaration");
      d.hint = GateHint::Matrix;
      d.mats.assign(d.length, *m);
    }
    ts.expect(";", "gate declaration");
    b.gate_ids[d.name] = (int)b.prog.gates.size();
    b.prog.gates.push_back(std::move(d));
  }
}

// --- flattening -----------------------------------------------------------

// Substitute bound variables; the remainder must be linear in main_var (or
// constant when main_var is null).
Lin resolve(const Poly& p, const std::map<std::string, i64>& env,
            const std::string* main_var, int line) {
  Lin l{0, p.c};
  for (auto& [v, k] : p.co) {
    auto it = env.find(v);
    if (it != env.end()) {
      l.b += k * it->second;
    } else if (main_var && v == *main_var) {
      l.k += k;
    } else {
      throw ParseError("unknown variable '" + v + "' in index expression", line);
    }
  }
  return l;
}

void flatten_into(Builder& b, Body& out, const std::vector<PStmt>& stmts,
                  std::map<std::string, i64>& env, const std::string* main_var);

void flatten_op(Builder& b, Body& out, const POp& op,
                const std::map<std::string, i64>& env,
                const std::string* main_var) {
  Instr in;
  in.cz = op.cz;
  if (op.cz) {
    in.a = {b.qubit(op.qa, op.line), resolve(op.ia, env, main_var, op.line)};
    in.b = {b.qubit(op.qb, op.line), resolve(op.ib, env, main_var, op.line)};
    if (in.a.array == in.b.array && in.a.idx == in.b.idx)
      throw ParseError("CZ operands are the same qubit", op.line);
  } else {
    int g = b.gate(op.gate, op.line);
    Lin gi = op.has_gidx ? resolve(op.gidx, env, main_var, op.line) : Lin{0, 0};
    if (!op.has_gidx && b.prog.gates[g].length != 1)
      throw ParseError("gate '" + op.gate + "' needs an element index", op.line);
    in.g.factors = {{g, gi}};
    in.a = {b.qubit(op.qa, op.line), resolve(op.ia, env, main_var, op.line)};
  }
  out.push_back(std::move(in));
}

void flatten_loop(Builder& b, Body& out, const PLoop& loop,
                  std::map<std::string, i64>& env,
                  const std::string* main_var) {
  auto bound = [&](const PBound& pb) -> i64 {
    if (pb.is_num) return pb.num;
    auto it = env.find(pb.name);
    if (it == env.end())
      throw ParseError("loop bound '" + pb.name +
                           "' is not a constant (only the pipelined loop may "
                           "have unknown bounds)",
                       loop.line);
    return it->second;
  };
  i64 lo = bound(loop.lo), hi = bound(loop.hi);
  if (env.count(loop.var) || (main_var && loop.var == *main_var))
    throw ParseError("loop variable '" + loop.var + "' shadows an outer loop",
                     loop.line);
  for (i64 v = lo; v <= hi; ++v) {
    env[loop.var] = v;
    flatten_into(b, out, loop.body, env, main_var);
  }
  env.erase(loop.var);
}

void flatten_into(Builder& b, Body& out, const std::vector<PStmt>& stmts,
                  std::map<std::string, i64>& env,
                  const std::string* main_var) {
  for (const PStmt& s : stmts) {
    if (s.is_op)
      flatten_op(b, out, s.op, env, main_var);
    else
      flatten_loop(b, out, *s.loop, env, main_var);
  }
}

// --- validation -----------------------------------------------------------

void check_ref(const LoopProgram& p, const Ref& r, const IterRange& range,
               const char* what) {
  i64 size = p.qubits[r.array].size;
  if (range.known && !range.empty()) {
    auto [lo, hi] = lin_bounds(r.idx, range.lo, range.hi);
    if (lo < 0 || hi >= size)
      throw ParseError(std::string(what) + ": qubit index [" +
                       std::to_string(lo) + ", " + std::to_string(hi) +
                       "] outside " + p.qubits[r.array].name + "[0.." +
                       std::to_string(size - 1) + "]");
  } else if (r.idx.k == 0 && (r.idx.b < 0 || r.idx.b >= size)) {
    throw ParseError(std::string(what) + ": qubit index " +
                     std::to_string(r.idx.b) + " outside " +
                     p.qubits[r.array].name);
  }
}

void validate(const LoopProgram& p) {
  IterRange fixed = IterRange::of(0, 0);
  auto check_body = [&](const Body& body, const IterRange& range,
                        const char* what) {
    for (const Instr& in : body) {
      for (const Ref& r : instr_refs(in)) check_ref(p, r, range, what);
      if (in.cz) {
        if (in.a.array == in.b.array && range.known && !range.empty() &&
            in_loop_alias(in.a.idx, in.b.idx, range))
          throw ParseError(std::string(what) +
                           ": CZ operands coincide at some iteration");
      } else {
        for (const Factor& f : in.g.factors) {
          const GateDef& d = p.gates[f.def];
          if (range.known && !range.empty()) {
            auto [lo, hi] = lin_bounds(f.idx, range.lo, range.hi);
            if (lo < 0 || hi >= d.length)
              throw ParseError(std::string(what) + ": gate index [" +
                               std::to_string(lo) + ", " + std::to_string(hi) +
                               "] outside " + d.name);
          } else if (f.idx.k == 0 && (f.idx.b < 0 || f.idx.b >= d.length)) {
            throw ParseError(std::string(what) + ": gate index outside " + d.name);
          }
        }
      }
    }
  };
  check_body(p.pre, fixed, "pre-loop code");
  check_body(p.post, fixed, "post-loop code");
  check_body(p.body, p.range, "loop body");
}

}  // namespace

LoopProgram parse_program(const std::string& text) {
  Stream ts(text);
  Builder b;
  parse_decls(ts, b);
  std::vector<PStmt> top = parse_stmts(ts);
  if (ts.peek().k != Tok::K::Eof) ts.fail("unexpected trailing input");

  int main_idx = -1;
  for (int i = 0; i < (int)top.size(); ++i)
    if (!top[i].is_op) main_idx = i;
  if (main_idx < 0)
    throw ParseError("program has no for loop to pipeline");

  std::map<std::string, i64> env;
  for (int i = 0; i < main_idx; ++i) {
    if (top[i].is_op)
      flatten_op(b, b.prog.pre, top[i].op, env, nullptr);
    else
      flatten_loop(b, b.prog.pre, *top[i].loop, env, nullptr);
  }
  const PLoop& main = *top[main_idx].loop;
  b.prog.var = main.var;
  b.prog.lo_is_num = main.lo.is_num;
  b.prog.hi_is_num = main.hi.is_num;
  b.prog.lo_name = main.lo.is_num ? std::to_string(main.lo.num) : main.lo.name;
  b.prog.hi_name = main.hi.is_num ? std::to_string(main.hi.num) : main.hi.name;
  if (main.lo.is_num && main.hi.is_num)
    b.prog.range = IterRange::of(main.lo.num, main.hi.num);
  else
    b.prog.range = IterRange::all();
  flatten_into(b, b.prog.body, main.body, env, &b.prog.var);
  for (int i = main_idx + 1; i < (int)top.size(); ++i) {
    if (top[i].is_op)
      flatten_op(b, b.prog.post, top[i].op, env, nullptr);
    else
      flatten_loop(b, b.prog.post, *top[i].loop, env, nullptr);
  }
  if (b.prog.body.empty())
    throw ParseError("pipelined loop body is empty");
  validate(b.prog);
  return b.prog;
}

LoopProgram parse_program_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_program(ss.str());
}

std::string program_print(const LoopProgram& p) {
  std::ostringstream os;
  for (const auto& q : p.qubits)
    os << "qubit " << q.name << "[" << q.size << "];\n";
  for (const auto& g : p.gates) {
    if (builtin_gate(g.name)) continue;
    os << "defgate " << g.name << "[" << g.length << "] = ";
    switch (g.hint) {
      case GateHint::Diag: os << "RZ"; break;
      case GateHint::Anti: os << "RZ+"; break;
      case GateHint::Unknown: os << "Unknown"; break;
      case GateHint::Matrix: os << "[...]"; break;
    }
    os << ";\n";
  }
  for (const Instr& in : p.pre) os << instr_str(p, in) << ";\n";
  os << "for " << p.var << " in " << p.lo_name << " to " << p.hi_name << " {\n";
  for (const Instr& in : p.body) os << "  " << instr_str(p, in) << ";\n";
  os << "}\n";
  for (const Instr& in : p.post) os << instr_str(p, in) << ";\n";
  return os.str();
}

}  // namespace qlsp
