// Shared token stream for the input and output language parsers.
#pragma once

#include <string>
#include <vector>

#include "qlsp/expr.hpp"
#include "qlsp/parse.hpp"

namespace qlsp::lex {

struct Tok {
  enum class K { Ident, Int, Float, Punct, Eof } k = K::Eof;
  std::string s;   // identifier or punctuation spelling
  i64 i = 0;       // Int
  double f = 0.0;  // Float
  int line = 1;
};

class Stream {
 public:
  explicit Stream(const std::string& text);

  const Tok& peek(int ahead = 0) const;
  Tok next();
  bool at(const std::string& punct_or_kw) const;
  // Consume the given punctuation/keyword if present.
  bool accept(const std::string& s);
  // Require and consume; throws ParseError otherwise.
  void expect(const std::string& s, const char* context);
  std::string expect_ident(const char* context);
  i64 expect_int(const char* context);       // allows a leading '-'
  double expect_number(const char* context); // int or float, leading '-'
  [[noreturn]] void fail(const std::string& msg) const;
  int line() const { return peek().line; }

 private:
  std::vector<Tok> toks_;
  size_t pos_ = 0;
};

}  // namespace qlsp::lex
