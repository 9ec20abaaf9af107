#include "qlsp/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace qlsp {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double uniform01(std::mt19937_64& rng) {
  return (double)(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double gaussian(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Binder::Binder(const std::vector<GateDef>& defs, uint64_t seed) : seed_(seed) {
  for (const GateDef& d : defs) hints_[d.name] = d.hint;
}

Mat2 Binder::resolve(const CFactor& f) const {
  if (f.known) return f.m;
  auto it = hints_.find(f.def);
  if (it == hints_.end())
    throw std::runtime_error("no binding hint for gate '" + f.def + "'");
  std::mt19937_64 rng(splitmix64(seed_ ^ fnv1a(f.def)) ^
                      splitmix64((uint64_t)f.elem * 0x9e3779b97f4a7c15ULL + 1));
  switch (it->second) {
    case GateHint::Diag:
      return gate_rz(2.0 * M_PI * uniform01(rng));
    case GateHint::Anti:
      return gate_rz_anti(2.0 * M_PI * uniform01(rng));
    case GateHint::Unknown: {
      // Gram-Schmidt on two complex gaussian vectors.
      cx v0(gaussian(rng), gaussian(rng)), v1(gaussian(rng), gaussian(rng));
      cx w0(gaussian(rng), gaussian(rng)), w1(gaussian(rng), gaussian(rng));
      double n0 = std::sqrt(std::norm(v0) + std::norm(v1));
      v0 /= n0;
      v1 /= n0;
      cx ip = std::conj(v0) * w0 + std::conj(v1) * w1;
      w0 -= ip * v0;
      w1 -= ip * v1;
      double n1 = std::sqrt(std::norm(w0) + std::norm(w1));
      w0 /= n1;
      w1 /= n1;
      return {v0, w0, v1, w1};
    }
    case GateHint::Matrix:
      throw std::runtime_error("matrix gate '" + f.def +
                               "' reached symbolic binding");
  }
  throw std::runtime_error("bad gate hint");
}

Mat2 Binder::gate_of(const ConcreteGate& g) const {
  Mat2 acc = Mat2::identity();
  for (const CFactor& f : g.f) acc = resolve(f).mul(acc);
  return acc;
}

StateVec::StateVec(int nqubits) : nq_(nqubits), amp_(1ULL << nqubits) {
  amp_[0] = 1.0;
}

void StateVec::set_basis(uint64_t index) {
  std::fill(amp_.begin(), amp_.end(), cx(0, 0));
  amp_.at(index) = 1.0;
}

void StateVec::randomize(std::mt19937_64& rng) {
  double norm2 = 0;
  for (cx& a : amp_) {
    a = cx(gaussian(rng), gaussian(rng));
    norm2 += std::norm(a);
  }
  double inv = 1.0 / std::sqrt(norm2);
  for (cx& a : amp_) a *= inv;
}

void StateVec::apply1(i64 q, const Mat2& m) {
  // Qubit q counts from the low bit of the amplitude index.
  uint64_t bit = 1ULL << q;
  uint64_t n = amp_.size();
  for (uint64_t i = 0; i < n; ++i) {
    if (i & bit) continue;
    cx a0 = amp_[i];
    cx a1 = amp_[i | bit];
    amp_[i] = m.a * a0 + m.b * a1;
    amp_[i | bit] = m.c * a0 + m.d * a1;
  }
}

void StateVec::apply_cz(i64 q1, i64 q2) {
  uint64_t mask = (1ULL << q1) | (1ULL << q2);
  uint64_t n = amp_.size();
  for (uint64_t i = 0; i < n; ++i)
    if ((i & mask) == mask) amp_[i] = -amp_[i];
}

void StateVec::apply(const std::vector<ConcreteGate>& gates, const Binder& b) {
  for (const ConcreteGate& g : gates) {
    if (g.cz)
      apply_cz(g.q1, g.q2);
    else
      for (const CFactor& f : g.f) apply1(g.q1, b.resolve(f));
  }
}

double StateVec::diff_up_to_phase(const StateVec& other) const {
  size_t best = 0;
  for (size_t i = 1; i < amp_.size(); ++i)
    if (std::abs(amp_[i]) > std::abs(amp_[best])) best = i;
  if (std::abs(amp_[best]) < 1e-12) return 1.0;
  cx mine = amp_[best];
  cx theirs = other.amp_[best];
  if (std::abs(theirs) < 1e-12) return 1.0;
  cx phase = (mine / std::abs(mine)) / (theirs / std::abs(theirs));
  double worst = 0;
  for (size_t i = 0; i < amp_.size(); ++i)
    worst = std::max(worst, std::abs(amp_[i] - phase * other.amp_[i]));
  return worst;
}

namespace {

ConcreteGate instantiate(const LoopProgram& p, const Instr& in, i64 i) {
  auto flat = [&](const Ref& r) -> i64 {
    i64 v = r.idx.at(i);
    const QubitArray& q = p.qubits[r.array];
    if (v < 0 || v >= q.size)
      throw std::runtime_error("qubit index " + std::to_string(v) +
                               " outside " + q.name);
    return p.qubit_base(r.array) + v;
  };
  ConcreteGate g;
  g.cz = in.cz;
  g.q1 = flat(in.a);
  if (in.cz) {
    g.q2 = flat(in.b);
    if (g.q1 == g.q2) throw std::runtime_error("CZ applied to a single qubit");
    return g;
  }
  for (const Factor& f : in.g.factors) {
    const GateDef& d = p.gates[f.def];
    i64 elem = f.idx.at(i);
    if (elem < 0 || elem >= d.length)
      throw std::runtime_error("gate index outside " + d.name);
    CFactor cf;
    if (d.hint == GateHint::Matrix) {
      cf.known = true;
      cf.m = d.mats.at(elem);
    } else {
      cf.known = false;
      cf.def = d.name;
      cf.elem = elem;
    }
    g.f.push_back(std::move(cf));
  }
  return g;
}

}  // namespace

std::vector<ConcreteGate> program_eval(const LoopProgram& p, i64 m, i64 n) {
  std::vector<ConcreteGate> out;
  for (const Instr& in : p.pre) out.push_back(instantiate(p, in, 0));
  for (i64 i = m; i <= n; ++i)
    for (const Instr& in : p.body) out.push_back(instantiate(p, in, i));
  for (const Instr& in : p.post) out.push_back(instantiate(p, in, 0));
  return out;
}

std::vector<ConcreteGate> body_eval(const LoopProgram& p, const Body& body) {
  std::vector<ConcreteGate> out;
  for (const Instr& in : body) out.push_back(instantiate(p, in, 0));
  return out;
}

}  // namespace qlsp
