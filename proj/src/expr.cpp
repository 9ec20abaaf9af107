#include "qlsp/expr.hpp"

#include <stdexcept>

namespace qlsp {

i64 euc_div(i64 a, i64 b) {
  i64 q = a / b;
  i64 r = a % b;
  // C++ truncates toward zero; fix up so the remainder matches sign(b).
  if (r != 0 && ((r < 0) != (b < 0))) q -= 1;
  return q;
}

i64 euc_mod(i64 a, i64 b) { return a - euc_div(a, b) * b; }

namespace {
Ex node(ExOp op, Ex l, Ex r) {
  auto n = std::make_shared<ExNode>();
  n->op = op;
  n->l = std::move(l);
  n->r = std::move(r);
  return n;
}
bool is_num(const Ex& e, i64 v) { return e->op == ExOp::Num && e->num == v; }
}  // namespace

Ex ex_num(i64 v) {
  auto n = std::make_shared<ExNode>();
  n->op = ExOp::Num;
  n->num = v;
  return n;
}

Ex ex_var(const std::string& name) {
  auto n = std::make_shared<ExNode>();
  n->op = ExOp::Var;
  n->var = name;
  return n;
}

Ex ex_add(Ex a, Ex b) {
  if (a->op == ExOp::Num && b->op == ExOp::Num) return ex_num(a->num + b->num);
  if (is_num(a, 0)) return b;
  if (is_num(b, 0)) return a;
  // Fold "x + (-c)" into "x - c" so printed text never contains "+ -3".
  if (b->op == ExOp::Num && b->num < 0) return node(ExOp::Sub, a, ex_num(-b->num));
  return node(ExOp::Add, a, b);
}

Ex ex_sub(Ex a, Ex b) {
  if (a->op == ExOp::Num && b->op == ExOp::Num) return ex_num(a->num - b->num);
  if (is_num(b, 0)) return a;
  if (b->op == ExOp::Num && b->num < 0) return node(ExOp::Add, a, ex_num(-b->num));
  return node(ExOp::Sub, a, b);
}

Ex ex_mul(Ex a, Ex b) {
  if (a->op == ExOp::Num && b->op == ExOp::Num) return ex_num(a->num * b->num);
  if (is_num(a, 1)) return b;
  if (is_num(b, 1)) return a;
  if (is_num(a, 0) || is_num(b, 0)) return ex_num(0);
  return node(ExOp::Mul, a, b);
}

Ex ex_div(Ex a, Ex b) {
  if (a->op == ExOp::Num && b->op == ExOp::Num && b->num != 0)
    return ex_num(euc_div(a->num, b->num));
  if (is_num(b, 1)) return a;
  return node(ExOp::Div, a, b);
}

Ex ex_mod(Ex a, Ex b) {
  if (a->op == ExOp::Num && b->op == ExOp::Num && b->num != 0)
    return ex_num(euc_mod(a->num, b->num));
  return node(ExOp::Mod, a, b);
}

Ex ex_lin(i64 k, const std::string& var, i64 b) {
  return ex_add(ex_mul(ex_num(k), ex_var(var)), ex_num(b));
}

bool ex_equal(const Ex& a, const Ex& b) {
  if (a.get() == b.get()) return true;
  if (a->op != b->op) return false;
  switch (a->op) {
    case ExOp::Num: return a->num == b->num;
    case ExOp::Var: return a->var == b->var;
    default: return ex_equal(a->l, b->l) && ex_equal(a->r, b->r);
  }
}

i64 ex_eval(const Ex& e, const std::map<std::string, i64>& env) {
  switch (e->op) {
    case ExOp::Num: return e->num;
    case ExOp::Var: {
      auto it = env.find(e->var);
      if (it == env.end()) throw std::runtime_error("unbound variable " + e->var);
      return it->second;
    }
    case ExOp::Add: return ex_eval(e->l, env) + ex_eval(e->r, env);
    case ExOp::Sub: return ex_eval(e->l, env) - ex_eval(e->r, env);
    case ExOp::Mul: return ex_eval(e->l, env) * ex_eval(e->r, env);
    case ExOp::Div: {
      i64 d = ex_eval(e->r, env);
      if (d == 0) throw std::runtime_error("division by zero");
      return euc_div(ex_eval(e->l, env), d);
    }
    case ExOp::Mod: {
      i64 d = ex_eval(e->r, env);
      if (d == 0) throw std::runtime_error("modulo by zero");
      return euc_mod(ex_eval(e->l, env), d);
    }
  }
  throw std::runtime_error("bad expression node");
}

namespace {
int prec(ExOp op) {
  switch (op) {
    case ExOp::Add:
    case ExOp::Sub: return 1;
    case ExOp::Mul:
    case ExOp::Div:
    case ExOp::Mod: return 2;
    default: return 3;
  }
}

void print_into(const Ex& e, std::string& out, int parent_prec, bool rhs) {
  int p = prec(e->op);
  switch (e->op) {
    case ExOp::Num:
      out += std::to_string(e->num);
      return;
    case ExOp::Var:
      out += e->var;
      return;
    default: break;
  }
  // Parenthesize when binding looser than the context, or equal on the right
  // of a non-associative position (a - (b + c), a / (b * c), ...).
  bool need = p < parent_prec || (p == parent_prec && rhs);
  if (need) out += '(';
  const char* sym = e->op == ExOp::Add ? " + "
                    : e->op == ExOp::Sub ? " - "
                    : e->op == ExOp::Mul ? " * "
                    : e->op == ExOp::Div ? " / "
                                         : " % ";
  print_into(e->l, out, p, false);
  out += sym;
  print_into(e->r, out, p, true);
  if (need) out += ')';
}
}  // namespace

std::string ex_print(const Ex& e) {
  std::string out;
  print_into(e, out, 0, false);
  return out;
}

}  // namespace qlsp
