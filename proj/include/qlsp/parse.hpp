// Parser for the input loop language. The last top-level for loop is the
// pipelined loop; earlier and later statements become straight-line pre/post
// code. Nested loops and non-final top-level loops must have constant
// bounds and are unrolled during parsing.
#pragma once

#include <stdexcept>
#include <string>

#include "qlsp/ast.hpp"

namespace qlsp {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what) {}
};

LoopProgram parse_program(const std::string& text);
LoopProgram parse_program_file(const std::string& path);

// Printed form of the input program (used for diagnostics and tests).
std::string program_print(const LoopProgram& p);

}  // namespace qlsp
