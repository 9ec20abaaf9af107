#include "qlsp/looptx.hpp"

#include <gtest/gtest.h>

#include <random>

#include "qlsp/compact.hpp"
#include "qlsp/parse.hpp"
#include "qlsp/simulate.hpp"

namespace qlsp {
namespace {

TEST(InstrAt, MakesAllIndicesConstant) {
  Instr in;
  in.g.factors.push_back({2, {3, -1}});
  in.a = {0, {2, 5}};
  Instr c = instr_at(in, 4);
  EXPECT_EQ(c.a.idx, (Lin{0, 13}));
  EXPECT_EQ(c.g.factors[0].idx, (Lin{0, 11}));
}

Body flatten(const Body& b, const IterRange& T) {
  Body out;
  if (T.empty()) return out;
  for (i64 i = T.lo; i <= T.hi; ++i)
    for (const Instr& in : b) out.push_back(instr_at(in, i));
  return out;
}

Body flatten_case(const UnrollCase& uc) {
  Body out = flatten(uc.body, uc.jrange);
  out.insert(out.end(), uc.remainder.begin(), uc.remainder.end());
  return out;
}

struct UnrollFixture : ::testing::Test {
  LoopProgram p;
  Body body;

  void SetUp() override {
    p = parse_program(R"(
      qubit q[20];
      for x in 0 to 7 { SQ(H) q[x]; CZ q[x], q[x+1]; }
    )");
    body = p.body;
  }
};

TEST_F(UnrollFixture, EvenRangeHasNoRemainder) {
  Unrolled u = unroll(p, body, IterRange::of(0, 7), 2);
  ASSERT_EQ(u.cases.size(), 1u);
  const UnrollCase& uc = u.cases[0];
  EXPECT_EQ(uc.q, 0);
  EXPECT_EQ(uc.jstart, 0);
  EXPECT_EQ(uc.jrange, IterRange::of(0, 3));
  EXPECT_TRUE(uc.remainder.empty());
  ASSERT_EQ(uc.body.size(), 4u);
  // Copy 0 has slopes doubled, copy 1 also carries offset +1 on the line.
  EXPECT_EQ(uc.body[0].a.idx, (Lin{2, 0}));
  EXPECT_EQ(uc.body[2].a.idx, (Lin{2, 1}));
}

TEST_F(UnrollFixture, OddTripCountLeavesStraightLineRemainder) {
  Unrolled u = unroll(p, body, IterRange::of(0, 8), 2);
  const UnrollCase& uc = u.cases[0];
  EXPECT_EQ(uc.jrange, IterRange::of(0, 3));
  ASSERT_EQ(uc.remainder.size(), 2u);
  EXPECT_EQ(uc.remainder[0].a.idx, (Lin{0, 8}));
  EXPECT_EQ(uc.remainder[1].b.idx, (Lin{0, 9}));
}

TEST_F(UnrollFixture, OffsetStartPicksResidue) {
  Unrolled u = unroll(p, body, IterRange::of(1, 6), 2);
  const UnrollCase& uc = u.cases[0];
  EXPECT_EQ(uc.q, 1);
  EXPECT_EQ(uc.jstart, 0);
  EXPECT_EQ(uc.jrange, IterRange::of(0, 2));
  EXPECT_TRUE(uc.remainder.empty());
  // j = 0 runs original iterations 1 and 2.
  EXPECT_EQ(uc.body[0].a.idx.at(0), 1);
  EXPECT_EQ(uc.body[2].a.idx.at(0), 2);
}

TEST_F(UnrollFixture, UnknownRangeYieldsOneCasePerResidue) {
  Unrolled u = unroll(p, body, IterRange::all(), 3);
  ASSERT_EQ(u.cases.size(), 3u);
  for (i64 q = 0; q < 3; ++q) {
    EXPECT_EQ(u.cases[q].q, q);
    EXPECT_FALSE(u.cases[q].jrange.known);
    EXPECT_TRUE(u.cases[q].remainder.empty());
    EXPECT_EQ(u.cases[q].body.size(), 6u);
  }
}

// Instantiating the unrolled case over its j range plus the remainder must
// reproduce the original instruction stream exactly, for many range/C
// combinations (including empty and sub-C ranges).
TEST_F(UnrollFixture, InstancesCoverTheRangeExactly) {
  for (i64 lo : {-5, -2, 0, 1, 3, 7})
    for (i64 len : {0, 1, 2, 3, 5, 8, 13})
      for (i64 C : {1, 2, 3, 4}) {
        IterRange T = IterRange::of(lo, lo + len - 1);
        Unrolled u = unroll(p, body, T, C);
        ASSERT_EQ(u.cases.size(), 1u);
        EXPECT_EQ(flatten_case(u.cases[0]), flatten(body, T))
            << "lo=" << lo << " len=" << len << " C=" << C;
        EXPECT_EQ(u.cases[0].jrange.lo, u.cases[0].jstart);
      }
}

TEST_F(UnrollFixture, UnknownCasesCoverEachResidueClass) {
  // Pick the case matching the concrete start's residue and check it
  // against the original over a window, as the guard dispatch would.
  for (i64 lo : {0, 1, 2, 5})
    for (i64 C : {2, 3}) {
      Unrolled u = unroll(p, body, IterRange::all(), C);
      i64 q = euc_mod(lo, C);
      const UnrollCase& uc = u.cases[q];
      i64 len = 2 * C;  // full trips only; remainders are the guard's job
      i64 jstart = euc_div(lo, C);
      Body got = flatten(uc.body, IterRange::of(jstart, jstart + 1));
      Body want = flatten(body, IterRange::of(lo, lo + len - 1));
      EXPECT_EQ(got, want) << "lo=" << lo << " C=" << C;
    }
}

// --- rotation -------------------------------------------------------------

// Flattened instruction stream of a rotation result: prologue instances at
// range-start offsets, the body over the shrunk range, epilogue instances
// past the final end.
Body flatten_rotated(const Rotated& r) {
  Body out;
  for (const EdgeInstr& e : r.prologue)
    out.push_back(instr_at(e.in, r.range.lo + e.off));
  Body mid = flatten(r.body, r.range);
  out.insert(out.end(), mid.begin(), mid.end());
  for (const EdgeInstr& e : r.epilogue)
    out.push_back(instr_at(e.in, r.range.hi + e.off));
  return out;
}

double rotated_diff(LoopProgram& p, uint64_t seed) {
  Body orig = p.body;
  IterRange T = p.range;
  Rotated r = rotate(p, orig, T);
  EXPECT_EQ(r.range.lo, T.lo);
  EXPECT_EQ(r.range.hi, T.hi - r.steps);
  for (const EdgeInstr& e : r.epilogue) EXPECT_GE(e.off, 1);

  Binder b(p.gates, seed);
  std::mt19937_64 rng(seed + 5);
  StateVec s1(static_cast<int>(p.total_qubits()));
  s1.randomize(rng);
  StateVec s2 = s1;
  s1.apply(body_eval(p, flatten(orig, T)), b);
  s2.apply(body_eval(p, flatten_rotated(r)), b);
  return s1.diff_up_to_phase(s2);
}

TEST(Rotate, HChainPeelsAndStaysEquivalent) {
  LoopProgram p = parse_program(R"(
    qubit q[12];
    for x in 0 to 7 { SQ(H) q[x]; CZ q[x], q[x+1]; SQ(H) q[x+1]; }
  )");
  Body orig = p.body;
  Rotated r = rotate(p, orig, p.range);
  EXPECT_GE(r.steps, 1);
  EXPECT_LT(rotated_diff(p, 11), 1e-9);
}

TEST(Rotate, AntidiagonalFamilyStaysEquivalent) {
  LoopProgram p = parse_program(R"(
    qubit q[12];
    defgate A[16] = RZ+;
    for x in 0 to 7 { SQ(A[x]) q[x]; CZ q[x], q[x+1]; }
  )");
  EXPECT_LT(rotated_diff(p, 23), 1e-9);
}

TEST(Rotate, NegativeSlopeStaysEquivalent) {
  LoopProgram p = parse_program(R"(
    qubit q[12];
    for x in 0 to 7 { SQ(H) q[8-x]; CZ q[8-x], q[9-x]; }
  )");
  EXPECT_LT(rotated_diff(p, 31), 1e-9);
}

TEST(Rotate, BareCzDoesNotRotate) {
  LoopProgram p = parse_program(R"(
    qubit q[12];
    for x in 0 to 7 { CZ q[x], q[x+1]; }
  )");
  Rotated r = rotate(p, p.body, p.range);
  EXPECT_EQ(r.steps, 0);
  EXPECT_TRUE(r.prologue.empty());
  EXPECT_TRUE(r.epilogue.empty());
  EXPECT_EQ(r.body, p.body);
  EXPECT_EQ(r.range, p.range);
}

TEST(Rotate, KnownRangeKeepsAtLeastOneIteration) {
  LoopProgram p = parse_program(R"(
    qubit q[12];
    for x in 0 to 1 { SQ(H) q[x]; CZ q[x], q[x+1]; SQ(H) q[x+1]; }
  )");
  Body orig = p.body;
  Rotated r = rotate(p, orig, p.range);
  EXPECT_GE(r.range.trips(), 1);
  EXPECT_LT(rotated_diff(p, 47), 1e-9);
}

TEST(Rotate, MarksAreClearedInTheResult) {
  LoopProgram p = parse_program(R"(
    qubit q[12];
    for x in 0 to 7 { SQ(H) q[x]; CZ q[x], q[x+1]; SQ(H) q[x+1]; }
  )");
  Rotated r = rotate(p, p.body, p.range);
  for (const Instr& in : r.body) EXPECT_FALSE(in.mark);
  for (const EdgeInstr& e : r.prologue) EXPECT_FALSE(e.in.mark);
  for (const EdgeInstr& e : r.epilogue) EXPECT_FALSE(e.in.mark);
}

// Randomized loop bodies: rotation must preserve semantics regardless of
// whether it finds opportunities.
TEST(Rotate, RandomBodiesStayEquivalent) {
  std::mt19937_64 rng(777);
  const char* defs[] = {"", "defgate A[24] = RZ+;", "defgate D[24] = RZ;",
                        "defgate U[24] = Unknown;"};
  for (int iter = 0; iter < 60; ++iter) {
    std::string text = "qubit q[14];\n";
    int flavor = static_cast<int>(rng() % 4);
    text += defs[flavor];
    text += "\nfor x in 0 to 5 {\n";
    size_t len = 1 + rng() % 4;
    for (size_t i = 0; i < len; ++i) {
      i64 off = rng() % 7;
      if (rng() % 3 == 0) {
        text += "  CZ q[x+" + std::to_string(off) + "], q[x+" +
                std::to_string(off + 1) + "];\n";
      } else if (flavor == 0) {
        text += "  SQ(H) q[x+" + std::to_string(off) + "];\n";
      } else {
        std::string name(1, "_ADU"[flavor]);
        text += "  SQ(" + name + "[x]) q[x+" + std::to_string(off) + "];\n";
      }
    }
    text += "}\n";
    LoopProgram p = parse_program(text);
    ASSERT_LT(rotated_diff(p, 900 + iter), 1e-9) << text;
  }
}

}  // namespace
}  // namespace qlsp
