#include "qlsp/parse.hpp"

#include <gtest/gtest.h>

namespace qlsp {
namespace {

TEST(Parse, MinimalProgram) {
  LoopProgram p = parse_program(R"(
    qubit q[8];
    for x in 0 to 5 {
      SQ(H) q[x];
      CZ q[x], q[x+1];
    }
  )");
  ASSERT_EQ(p.qubits.size(), 1u);
  EXPECT_EQ(p.qubits[0].name, "q");
  EXPECT_EQ(p.qubits[0].size, 8);
  EXPECT_EQ(p.var, "x");
  EXPECT_EQ(p.range, IterRange::of(0, 5));
  ASSERT_EQ(p.body.size(), 2u);
  EXPECT_FALSE(p.body[0].cz);
  EXPECT_EQ(p.body[0].a.idx, (Lin{1, 0}));
  EXPECT_TRUE(p.body[1].cz);
  EXPECT_EQ(p.body[1].b.idx, (Lin{1, 1}));
  EXPECT_TRUE(p.pre.empty());
  EXPECT_TRUE(p.post.empty());
}

TEST(Parse, IndexExpressions) {
  LoopProgram p = parse_program(R"(
    qubit q[32];
    for x in 0 to 3 {
      SQ(H) q[3*x+1];
      SQ(H) q[7-x];
      SQ(H) q[2*(x+1)];
      CZ q[x+4], q[0];
    }
  )");
  EXPECT_EQ(p.body[0].a.idx, (Lin{3, 1}));
  EXPECT_EQ(p.body[1].a.idx, (Lin{-1, 7}));
  EXPECT_EQ(p.body[2].a.idx, (Lin{2, 2}));
  EXPECT_EQ(p.body[3].a.idx, (Lin{1, 4}));
  EXPECT_EQ(p.body[3].b.idx, (Lin{0, 0}));
}

TEST(Parse, GateDefinitionForms) {
  LoopProgram p = parse_program(R"(
    qubit q[4];
    defgate D[10] = RZ;
    defgate A[10] = RZ+;
    defgate U[10] = Unknown;
    defgate W[2] = [((1,0),(0,0),(0,0),(1,0)),
                    ((0,0),(1,0),(1,0),(0,0))];
    defgate HH[1] = H;
    for x in 0 to 3 {
      SQ(D[x]) q[x];
      SQ(A[2*x]) q[x];
      SQ(U[x+1]) q[x];
      SQ(W[1]) q[x];
      SQ(HH) q[x];
    }
  )");
  auto find = [&](const std::string& n) -> const GateDef& {
    for (const GateDef& d : p.gates)
      if (d.name == n) return d;
    ADD_FAILURE() << "no def " << n;
    static GateDef none;
    return none;
  };
  EXPECT_EQ(find("D").hint, GateHint::Diag);
  EXPECT_EQ(find("A").hint, GateHint::Anti);
  EXPECT_EQ(find("U").hint, GateHint::Unknown);
  const GateDef& w = find("W");
  EXPECT_EQ(w.hint, GateHint::Matrix);
  ASSERT_EQ(w.mats.size(), 2u);
  EXPECT_TRUE(w.mats[1].approx(gate_x()));
  EXPECT_TRUE(find("HH").mats[0].approx(gate_h()));
  // Factor indices follow the written expressions.
  EXPECT_EQ(p.body[0].g.factors[0].idx, (Lin{1, 0}));
  EXPECT_EQ(p.body[1].g.factors[0].idx, (Lin{2, 0}));
  EXPECT_EQ(p.body[2].g.factors[0].idx, (Lin{1, 1}));
  EXPECT_EQ(p.body[3].g.factors[0].idx, (Lin{0, 1}));
}

TEST(Parse, BuiltinGateSugar) {
  LoopProgram p = parse_program(R"(
    qubit q[4];
    for x in 0 to 3 { SQ(T) q[x]; }
  )");
  const Factor& f = p.body[0].g.factors[0];
  EXPECT_EQ(p.gates[f.def].name, "T");
  EXPECT_EQ(p.gates[f.def].hint, GateHint::Matrix);
  EXPECT_EQ(f.idx, (Lin{0, 0}));
}

TEST(Parse, PrePostAndLastLoopWins) {
  LoopProgram p = parse_program(R"(
    qubit q[10];
    SQ(H) q[0];
    for s in 0 to 2 { SQ(H) q[s]; }
    SQ(X) q[1];
    for x in 2 to 7 { CZ q[x], q[x-1]; }
    SQ(H) q[9];
  )");
  // The earlier loop has constant bounds and unrolls into the pre code.
  EXPECT_EQ(p.pre.size(), 1u + 3u + 1u);
  EXPECT_EQ(p.var, "x");
  EXPECT_EQ(p.range, IterRange::of(2, 7));
  ASSERT_EQ(p.body.size(), 1u);
  EXPECT_EQ(p.post.size(), 1u);
  // Unrolled pre refs are constants.
  EXPECT_EQ(p.pre[2].a.idx, (Lin{0, 1}));
}

TEST(Parse, NestedConstantLoopUnrolls) {
  LoopProgram p = parse_program(R"(
    qubit q[12];
    for x in 0 to 3 {
      for r in 0 to 1 { SQ(H) q[2*x+r]; }
      CZ q[2*x], q[2*x+1];
    }
  )");
  ASSERT_EQ(p.body.size(), 3u);
  EXPECT_EQ(p.body[0].a.idx, (Lin{2, 0}));
  EXPECT_EQ(p.body[1].a.idx, (Lin{2, 1}));
}

TEST(Parse, UnknownRange) {
  LoopProgram p = parse_program(R"(
    qubit q[16];
    for x in m to n { SQ(H) q[x]; }
  )");
  EXPECT_FALSE(p.range.known);
  EXPECT_FALSE(p.lo_is_num);
  EXPECT_FALSE(p.hi_is_num);
  EXPECT_EQ(p.lo_name, "m");
  EXPECT_EQ(p.hi_name, "n");

  LoopProgram h = parse_program(R"(
    qubit q[16];
    for x in 2 to n { SQ(H) q[x]; }
  )");
  EXPECT_FALSE(h.range.known);
  EXPECT_TRUE(h.lo_is_num);
  EXPECT_EQ(h.lo_name, "2");
  EXPECT_EQ(h.hi_name, "n");
}

TEST(Parse, CommentsAndWhitespace) {
  LoopProgram p = parse_program(
      "qubit q[4]; // trailing\n// full line\nfor x in 0 to 1 { SQ(H) q[x];"
      " // end\n}\n");
  EXPECT_EQ(p.body.size(), 1u);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_program("for x in 0 to 3 { }"), ParseError);
  EXPECT_THROW(parse_program("qubit q[4]; for x in 0 to 3 { SQ(H) r[x]; }"),
               ParseError);
  // A CZ whose operands can coincide is ill-formed.
  EXPECT_THROW(
      parse_program("qubit q[9]; for x in 0 to 3 { CZ q[x], q[0]; }"),
      ParseError);
  EXPECT_THROW(parse_program("qubit q[4]; for x in 0 to 3 { SQ(G[x]) q[x]; }"),
               ParseError);
  EXPECT_THROW(parse_program("qubit q[4]; for x in 0 to 3 { SQ(H) q[x*x]; }"),
               ParseError);
  EXPECT_THROW(parse_program("qubit q[4]; for x in m to 3 { for r in m to 3 "
                             "{ SQ(H) q[r]; } }"),
               ParseError);
  EXPECT_THROW(parse_program("qubit q[4]"), ParseError);
}

TEST(Parse, PrintReparseFixpoint) {
  const char* src = R"(
    qubit q[9];
    defgate A[8] = RZ+;
    SQ(H) q[0];
    for x in 0 to 7 {
      SQ(A[x]) q[x];
      CZ q[x], q[x+1];
    }
    SQ(H) q[8];
  )";
  LoopProgram p = parse_program(src);
  std::string once = program_print(p);
  std::string twice = program_print(parse_program(once));
  EXPECT_EQ(once, twice);
}

}  // namespace
}  // namespace qlsp
