#include "qlsp/verify.hpp"

#include <random>
#include <utility>
#include <vector>

#include "qlsp/simulate.hpp"

namespace qlsp {

namespace {

std::map<std::string, i64> bounds_env(const LoopProgram& p, i64 m, i64 n) {
  std::map<std::string, i64> env;
  if (!p.range.known) {
    if (!p.lo_is_num) env[p.lo_name] = m;
    if (!p.hi_is_num) env[p.hi_name] = n;
  }
  return env;
}

std::vector<std::pair<i64, i64>> candidate_ranges(const LoopProgram& p,
                                                  i64 max_trips) {
  std::vector<std::pair<i64, i64>> r;
  if (p.range.known) {
    r.emplace_back(p.range.lo, p.range.hi);
    return r;
  }
  if (p.lo_is_num) {
    i64 m = std::stoll(p.lo_name);
    for (i64 trips = 0; trips <= max_trips; ++trips)
      r.emplace_back(m, m + trips - 1);
  } else if (p.hi_is_num) {
    i64 n = std::stoll(p.hi_name);
    for (i64 trips = 0; trips <= max_trips; ++trips)
      r.emplace_back(n - trips + 1, n);
  } else {
    for (i64 m : {0, 1, 2})
      for (i64 trips = 0; trips <= max_trips; ++trips)
        r.emplace_back(m, m + trips - 1);
  }
  return r;
}

}  // namespace

VerifyResult verify_equivalence(const LoopProgram& p, const OutProgram& out,
                                const VerifyOptions& opt) {
  VerifyResult vr;
  const i64 nq = p.total_qubits();
  if (nq > opt.max_qubits) {
    vr.detail = "skipped: " + std::to_string(nq) + " qubits exceeds the " +
                std::to_string(opt.max_qubits) + "-qubit cap";
    return vr;
  }
  if (nq == 0) {
    vr.detail = "skipped: no qubits";
    return vr;
  }

  for (auto [m, n] : candidate_ranges(p, opt.max_trips)) {
    std::vector<ConcreteGate> ref;
    try {
      ref = program_eval(p, m, n);
    } catch (const std::exception&) {
      continue;  // the source itself cannot run at this range
    }
    std::vector<ConcreteGate> got;
    try {
      got = out_eval(out, bounds_env(p, m, n));
    } catch (const std::exception& e) {
      vr.ran = true;
      vr.ok = false;
      vr.detail = "range " + std::to_string(m) + ":" + std::to_string(n) +
                  ": output failed to evaluate: " + e.what();
      return vr;
    }
    vr.ran = true;
    ++vr.ranges_checked;
    for (int t = 0; t < opt.trials; ++t) {
      Binder binder(p.gates, opt.seed + static_cast<uint64_t>(t));
      std::mt19937_64 rng(opt.seed * 0x9e3779b97f4a7c15ULL +
                          static_cast<uint64_t>(t) * 1000003ULL +
                          static_cast<uint64_t>(m - n));
      StateVec sa(static_cast<int>(nq));
      sa.randomize(rng);
      StateVec sb = sa;
      sa.apply(ref, binder);
      sb.apply(got, binder);
      double d = sa.diff_up_to_phase(sb);
      vr.max_diff = std::max(vr.max_diff, d);
      if (d > opt.tol) {
        vr.ok = false;
        vr.detail = "range " + std::to_string(m) + ":" + std::to_string(n) +
                    " trial " + std::to_string(t) +
                    ": state mismatch (diff " + std::to_string(d) + ")";
        return vr;
      }
    }
  }
  if (!vr.ran) vr.detail = "skipped: no executable concrete range found";
  return vr;
}

}  // namespace qlsp
