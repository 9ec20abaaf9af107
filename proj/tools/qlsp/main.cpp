// qlsp: software-pipelining compiler for one-dimensional quantum for-loops.
//
//   qlsp compile input.qlp [flags]
//
// Writes the pipelined program next to the input (.qlp -> .qlo) unless
// --out is given. Exit codes: 0 ok, 1 error, 2 verification mismatch.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qlsp/compact.hpp"
#include "qlsp/outprog.hpp"
#include "qlsp/parse.hpp"
#include "qlsp/pipeline.hpp"
#include "qlsp/verify.hpp"

namespace {

using qlsp::i64;

struct Args {
  std::string input;
  std::string out_path;
  std::string stats_path;
  std::string range;  // "m:n" | "unknown" | empty (keep program's range)
  qlsp::CompileOptions copt;
  bool verify = false;
  int verify_qubits = 20;
  int verify_states = 8;
  uint64_t seed = 1;
  bool inject_fault = false;  // self-test aid: corrupt the output on purpose
};

int usage(std::ostream& os) {
  os << "usage: qlsp compile input.qlp [flags]\n"
        "  --out FILE            output path (default: input with .qlo)\n"
        "  --unroll C            unroll factor (default 2)\n"
        "  --range m:n|unknown   override the main loop range\n"
        "  --emit MODE           pipelined | kernel-asap | unrolled-asap\n"
        "  --stats FILE          write depth statistics JSON (known range)\n"
        "  --max-ii N            cap the initiation-interval search\n"
        "  --no-compact          disable compaction and rotation\n"
        "  --dump-qdg            print dependency graphs to stdout\n"
        "  --dump-table          print scheduling tables to stdout\n"
        "  --verify              check output against brute-force unrolling\n"
        "  --verify-qubits N     largest state vector to simulate (default 20)\n"
        "  --verify-states K     random (binding, state) trials (default 8)\n"
        "  --seed S              verification RNG seed (default 1)\n"
        "  --inject-fault        corrupt the output (verification self-test)\n";
  return 1;
}

bool parse_i64(const std::string& s, i64& v) {
  try {
    size_t pos = 0;
    v = std::stoll(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

int fail(const std::string& msg) {
  std::cerr << "qlsp: " << msg << "\n";
  return 1;
}

std::string default_out(const std::string& in) {
  std::string base = in;
  if (base.size() > 4 && base.substr(base.size() - 4) == ".qlp")
    base.resize(base.size() - 4);
  return base + ".qlo";
}

std::string stats_json(const qlsp::Stats& s, bool fallback) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"asap\": " << s.asap << ",\n";
  os << "  \"c_asap\": " << s.c_asap << ",\n";
  os << "  \"pre_depth\": " << s.pre_depth << ",\n";
  os << "  \"kernel_depth\": " << s.kernel_depth << ",\n";
  os << "  \"post_depth\": " << s.post_depth << ",\n";
  os << "  \"iters\": " << s.iters << ",\n";
  os << "  \"kernel_asap_total\": " << s.kernel_asap_total << ",\n";
  os << "  \"unroll_total\": " << s.unroll_total << ",\n";
  os << "  \"qsp_iters\": " << s.qsp_iters << ",\n";
  os << "  \"qsp_total\": " << s.qsp_total << ",\n";
  os << "  \"fallback\": " << (fallback ? "true" : "false") << "\n";
  os << "}\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h")
    return usage(args.empty() ? std::cerr : std::cout);
  if (args[0] != "compile") return usage(std::cerr);

  Args a;
  for (size_t i = 1; i < args.size(); ++i) {
    const std::string& f = args[i];
    auto value = [&](std::string& into) -> bool {
      if (i + 1 >= args.size()) return false;
      into = args[++i];
      return true;
    };
    std::string v;
    if (f == "--out") {
      if (!value(a.out_path)) return fail("--out needs a path");
    } else if (f == "--stats") {
      if (!value(a.stats_path)) return fail("--stats needs a path");
    } else if (f == "--range") {
      if (!value(a.range)) return fail("--range needs m:n or unknown");
    } else if (f == "--unroll") {
      if (!value(v) || !parse_i64(v, a.copt.unroll) || a.copt.unroll < 1)
        return fail("--unroll needs a positive integer");
    } else if (f == "--max-ii") {
      if (!value(v) || !parse_i64(v, a.copt.max_ii) || a.copt.max_ii < 1)
        return fail("--max-ii needs a positive integer");
    } else if (f == "--emit") {
      if (!value(v)) return fail("--emit needs a mode");
      if (v == "pipelined") a.copt.emit = qlsp::EmitMode::Pipelined;
      else if (v == "kernel-asap") a.copt.emit = qlsp::EmitMode::KernelAsap;
      else if (v == "unrolled-asap") a.copt.emit = qlsp::EmitMode::UnrolledAsap;
      else return fail("unknown emit mode '" + v + "'");
    } else if (f == "--no-compact") {
      a.copt.compact = false;
    } else if (f == "--dump-qdg") {
      a.copt.dump_qdg = true;
    } else if (f == "--dump-table") {
      a.copt.dump_table = true;
    } else if (f == "--verify") {
      a.verify = true;
    } else if (f == "--verify-qubits") {
      i64 n;
      if (!value(v) || !parse_i64(v, n) || n < 1 || n > 28)
        return fail("--verify-qubits needs an integer in [1, 28]");
      a.verify_qubits = static_cast<int>(n);
    } else if (f == "--verify-states") {
      i64 n;
      if (!value(v) || !parse_i64(v, n) || n < 1)
        return fail("--verify-states needs a positive integer");
      a.verify_states = static_cast<int>(n);
    } else if (f == "--seed") {
      i64 n;
      if (!value(v) || !parse_i64(v, n)) return fail("--seed needs an integer");
      a.seed = static_cast<uint64_t>(n);
    } else if (f == "--inject-fault") {
      a.inject_fault = true;
    } else if (!f.empty() && f[0] == '-') {
      return fail("unknown flag '" + f + "'");
    } else if (a.input.empty()) {
      a.input = f;
    } else {
      return fail("unexpected argument '" + f + "'");
    }
  }
  if (a.input.empty()) return fail("no input file");

  qlsp::LoopProgram prog;
  try {
    prog = qlsp::parse_program_file(a.input);
  } catch (const std::exception& e) {
    return fail(std::string(e.what()));
  }

  if (!a.range.empty()) {
    if (a.range == "unknown") {
      prog.range = qlsp::IterRange::all();
      prog.lo_name = "m";
      prog.hi_name = "n";
      prog.lo_is_num = prog.hi_is_num = false;
    } else {
      size_t colon = a.range.find(':');
      i64 lo, hi;
      if (colon == std::string::npos || !parse_i64(a.range.substr(0, colon), lo) ||
          !parse_i64(a.range.substr(colon + 1), hi))
        return fail("--range needs m:n or unknown");
      prog.range = qlsp::IterRange::of(lo, hi);
      prog.lo_name = std::to_string(lo);
      prog.hi_name = std::to_string(hi);
      prog.lo_is_num = prog.hi_is_num = true;
    }
  }

  const qlsp::LoopProgram source = prog;  // pristine copy for verification
  qlsp::CompileResult res;
  try {
    res = qlsp::compile(prog, a.copt);
  } catch (const std::exception& e) {
    return fail(std::string("compile failed: ") + e.what());
  }
  if (a.copt.dump_qdg) std::cout << res.qdg_dump;
  if (a.copt.dump_table) std::cout << res.table_dump;

  if (a.inject_fault) {
    // Append a stray Z so --verify has something real to catch.
    int zdef = -1;
    for (size_t i = 0; i < res.out.gates.size(); ++i)
      if (res.out.gates[i].name == "Z") zdef = static_cast<int>(i);
    if (zdef >= 0 && !res.out.qubits.empty()) {
      qlsp::OutStmt s;
      s.kind = qlsp::OutStmt::Kind::Op;
      s.op.gate = zdef;
      s.op.gate_idx = qlsp::ex_num(0);
      s.op.qa = 0;
      s.op.ia = qlsp::ex_num(0);
      res.out.stmts.push_back(std::move(s));
    }
  }

  std::string out_path = a.out_path.empty() ? default_out(a.input) : a.out_path;
  {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) return fail("cannot write " + out_path);
    os << qlsp::out_print(res.out);
  }

  if (!a.stats_path.empty()) {
    if (!res.have_stats)
      return fail("--stats needs a known loop range");
    std::ofstream os(a.stats_path, std::ios::binary);
    if (!os) return fail("cannot write " + a.stats_path);
    os << stats_json(res.stats, res.fallback);
  }

  if (a.verify) {
    qlsp::VerifyOptions vo;
    vo.max_qubits = a.verify_qubits;
    vo.trials = a.verify_states;
    vo.seed = a.seed;
    qlsp::VerifyResult vr = qlsp::verify_equivalence(source, res.out, vo);
    if (!vr.ran) {
      std::cout << "verify: " << vr.detail << "\n";
    } else if (vr.ok) {
      std::cout << "verify: ok (" << vr.ranges_checked << " range"
                << (vr.ranges_checked == 1 ? "" : "s") << ", max diff "
                << vr.max_diff << ")\n";
    } else {
      std::cerr << "verify: MISMATCH: " << vr.detail << "\n";
      return 2;
    }
  }
  return 0;
}
