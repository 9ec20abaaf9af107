#include "qlsp/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qlsp/verify.hpp"

#ifndef QLSP_CORPUS_DIR
#define QLSP_CORPUS_DIR "corpus"
#endif

namespace qlsp {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  EXPECT_TRUE(in.good()) << path;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoopProgram load(const std::string& name) {
  return parse_program(slurp(std::string(QLSP_CORPUS_DIR) + "/" + name));
}

std::vector<std::string> corpus_files() {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(QLSP_CORPUS_DIR))
    if (e.path().extension() == ".qlp") names.push_back(e.path().filename());
  std::sort(names.begin(), names.end());
  EXPECT_FALSE(names.empty());
  return names;
}

// Every corpus program small enough for state-vector checking must compile
// to a semantically equivalent parallel program, within the retry budget.
TEST(Pipeline, CorpusProgramsVerify) {
  for (const std::string& name : corpus_files()) {
    LoopProgram p = load(name);
    if (p.total_qubits() > 14) continue;
    if (p.range.known && p.range.trips() > 8) continue;
    CompileResult r = compile(p, {});
    EXPECT_LE(r.retries, r.retry_cap) << name;
    VerifyResult v = verify_equivalence(p, r.out);
    EXPECT_TRUE(v.ran) << name << ": " << v.detail;
    EXPECT_TRUE(v.ok) << name << ": " << v.detail << " diff " << v.max_diff;
  }
}

TEST(Pipeline, StatsIdentitiesHoldAcrossCorpus) {
  for (const std::string& name : corpus_files()) {
    LoopProgram p = load(name);
    if (!p.range.known) continue;
    CompileResult r = compile(p, {});
    ASSERT_TRUE(r.have_stats) << name;
    const Stats& st = r.stats;
    EXPECT_EQ(st.qsp_total,
              st.pre_depth + st.kernel_depth * st.qsp_iters + st.post_depth)
        << name;
    EXPECT_EQ(st.kernel_asap_total, st.asap * st.iters) << name;
    EXPECT_EQ(st.iters, p.range.trips()) << name;
    EXPECT_GE(st.kernel_depth, 1) << name;
    EXPECT_GE(st.c_asap, st.asap) << name;
    if (!r.fallback) {
      EXPECT_LT(st.kernel_depth, st.c_asap) << name;
    }
  }
}

TEST(Pipeline, FallbackIsReportedHonestly) {
  // Four iterations leave no room for a steady state: the compacted source
  // loop is emitted and the stats say so.
  CompileResult sugar = compile(load("small_sugar.qlp"), {});
  EXPECT_TRUE(sugar.fallback);
  EXPECT_EQ(sugar.stats.kernel_depth, sugar.stats.asap);
  EXPECT_EQ(sugar.stats.qsp_iters, sugar.stats.iters);
  EXPECT_EQ(sugar.stats.pre_depth, 0);
  EXPECT_EQ(sugar.stats.post_depth, 0);

  CompileResult chain = compile(load("small_chain.qlp"), {});
  EXPECT_FALSE(chain.fallback);
}

// Three identical CZs pipeline into a single one-tick kernel row of three
// parallel CZs from consecutive stages.
TEST(Pipeline, ThreeCzMicrobenchmarkReachesDepthOneKernel) {
  LoopProgram p = load("triple_cz.qlp");
  CompileOptions opt;
  opt.unroll = 1;
  opt.compact = false;
  CompileResult r = compile(p, opt);
  EXPECT_FALSE(r.fallback);
  EXPECT_EQ(r.stats.kernel_depth, 1);

  const OutStmt* kernel = nullptr;
  for (const OutStmt& s : r.out.stmts)
    if (s.kind == OutStmt::Kind::For) {
      EXPECT_EQ(kernel, nullptr) << "more than one loop emitted";
      kernel = &s;
    }
  ASSERT_NE(kernel, nullptr);
  ASSERT_EQ(kernel->body.size(), 1u);
  ASSERT_EQ(kernel->body[0].kind, OutStmt::Kind::Parallel);
  ASSERT_EQ(kernel->body[0].par.size(), 3u);
  for (const OutOp& op : kernel->body[0].par) EXPECT_TRUE(op.cz);

  VerifyResult v = verify_equivalence(p, r.out);
  EXPECT_TRUE(v.ran && v.ok) << v.detail;
}

TEST(Pipeline, UnrolledLayoutNeedsKnownBounds) {
  LoopProgram p = load("guard_chain.qlp");
  ASSERT_FALSE(p.range.known);
  CompileOptions opt;
  opt.emit = EmitMode::UnrolledAsap;
  EXPECT_THROW(compile(p, opt), std::runtime_error);
}

TEST(Pipeline, EmittedProgramsSurvivePrintParseRoundTrip) {
  for (const std::string& name : corpus_files()) {
    CompileResult r = compile(load(name), {});
    std::string text = out_print(r.out);
    OutProgram back = out_parse(text);
    EXPECT_TRUE(out_equal(r.out, back)) << name;
    EXPECT_EQ(out_print(back), text) << name;
  }
}

TEST(Pipeline, CompilationIsDeterministic) {
  CompileResult a = compile(load("small_chain.qlp"), {});
  CompileResult b = compile(load("small_chain.qlp"), {});
  EXPECT_EQ(out_print(a.out), out_print(b.out));
  EXPECT_EQ(a.stats.qsp_total, b.stats.qsp_total);
  EXPECT_EQ(a.retries, b.retries);
}

TEST(Pipeline, UncompactedPipelineStaysEquivalent) {
  for (const char* name : {"small_chain.qlp", "small_arr1.qlp"}) {
    LoopProgram p = load(name);
    CompileOptions opt;
    opt.compact = false;
    CompileResult r = compile(p, opt);
    VerifyResult v = verify_equivalence(p, r.out);
    EXPECT_TRUE(v.ran && v.ok) << name << ": " << v.detail;
  }
}

TEST(Pipeline, BaselineEmissionModesVerify) {
  LoopProgram p = load("small_chain.qlp");
  for (EmitMode mode : {EmitMode::KernelAsap, EmitMode::UnrolledAsap}) {
    CompileOptions opt;
    opt.emit = mode;
    CompileResult r = compile(p, opt);
    VerifyResult v = verify_equivalence(p, r.out);
    EXPECT_TRUE(v.ran && v.ok) << v.detail;
  }
}

TEST(Pipeline, UnrollFactorsOneAndThreeVerify) {
  LoopProgram p = load("small_chain.qlp");
  for (i64 c : {1, 3}) {
    CompileOptions opt;
    opt.unroll = c;
    CompileResult r = compile(p, opt);
    VerifyResult v = verify_equivalence(p, r.out);
    EXPECT_TRUE(v.ran && v.ok) << "C=" << c << ": " << v.detail;
  }
}

TEST(Pipeline, UnknownRangeEmitsGuardDispatch) {
  LoopProgram p = load("guard_chain.qlp");
  CompileResult r = compile(p, {});
  const OutStmt* guard = nullptr;
  for (const OutStmt& s : r.out.stmts)
    if (s.kind == OutStmt::Kind::Guard) {
      EXPECT_EQ(guard, nullptr);
      guard = &s;
    }
  ASSERT_NE(guard, nullptr);
  // One short-range case, one per residue class, and a catch-all.
  ASSERT_EQ(guard->cases.size(), 3u);
  EXPECT_FALSE(guard->cases[0].otherwise);
  EXPECT_TRUE(guard->cases.back().otherwise);
  EXPECT_FALSE(r.have_stats);
}

TEST(Pipeline, DumpFlagsProduceDiagnostics) {
  CompileOptions opt;
  opt.dump_qdg = true;
  opt.dump_table = true;
  CompileResult r = compile(load("small_chain.qlp"), opt);
  EXPECT_NE(r.qdg_dump.find("qdg nodes="), std::string::npos);
  EXPECT_NE(r.table_dump.find("slot 0:"), std::string::npos);
}

}  // namespace
}  // namespace qlsp
