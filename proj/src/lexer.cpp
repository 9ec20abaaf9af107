#include "lexer.hpp"

#include <cctype>
#include <cstdlib>

namespace qlsp::lex {

Stream::Stream(const std::string& text) {
  size_t i = 0, n = text.size();
  int line = 1;
  while (i < n) {
    char c = text[i];
    if (c == '\n') {
      ++line, ++i;
      continue;
    }
    if (std::isspace((unsigned char)c)) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    Tok t;
    t.line = line;
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t j = i;
      while (j < n && (std::isalnum((unsigned char)text[j]) || text[j] == '_'))
        ++j;
      t.k = Tok::K::Ident;
      t.s = text.substr(i, j - i);
      i = j;
    } else if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < n && std::isdigit((unsigned char)text[j])) ++j;
      bool flt = false;
      if (j < n && (text[j] == '.' || text[j] == 'e' || text[j] == 'E')) {
        flt = true;
        if (text[j] == '.') {
          ++j;
          while (j < n && std::isdigit((unsigned char)text[j])) ++j;
        }
        if (j < n && (text[j] == 'e' || text[j] == 'E')) {
          ++j;
          if (j < n && (text[j] == '+' || text[j] == '-')) ++j;
          while (j < n && std::isdigit((unsigned char)text[j])) ++j;
        }
      }
      std::string num = text.substr(i, j - i);
      if (flt) {
        t.k = Tok::K::Float;
        t.f = std::strtod(num.c_str(), nullptr);
      } else {
        t.k = Tok::K::Int;
        t.i = std::strtoll(num.c_str(), nullptr, 10);
      }
      i = j;
    } else {
      // Multi-character operators first.
      static const char* two[] = {"==", "!=", "<=", ">=", "=>"};
      t.k = Tok::K::Punct;
      t.s = std::string(1, c);
      if (i + 1 < n) {
        std::string pair = text.substr(i, 2);
        for (const char* op : two)
          if (pair == op) {
            t.s = pair;
            break;
          }
      }
      i += t.s.size();
    }
    toks_.push_back(std::move(t));
  }
  Tok eof;
  eof.k = Tok::K::Eof;
  eof.line = line;
  toks_.push_back(eof);
}

const Tok& Stream::peek(int ahead) const {
  size_t p = pos_ + (size_t)ahead;
  if (p >= toks_.size()) p = toks_.size() - 1;
  return toks_[p];
}

Tok Stream::next() {
  Tok t = peek();
  if (pos_ + 1 < toks_.size()) ++pos_;
  return t;
}

bool Stream::at(const std::string& s) const {
  const Tok& t = peek();
  return (t.k == Tok::K::Punct || t.k == Tok::K::Ident) && t.s == s;
}

bool Stream::accept(const std::string& s) {
  if (!at(s)) return false;
  next();
  return true;
}

void Stream::expect(const std::string& s, const char* context) {
  if (!accept(s))
    fail("expected '" + s + "' in " + context);
}

std::string Stream::expect_ident(const char* context) {
  if (peek().k != Tok::K::Ident)
    fail(std::string("expected identifier in ") + context);
  return next().s;
}

i64 Stream::expect_int(const char* context) {
  bool neg = accept("-");
  if (peek().k != Tok::K::Int)
    fail(std::string("expected integer in ") + context);
  i64 v = next().i;
  return neg ? -v : v;
}

double Stream::expect_number(const char* context) {
  bool neg = accept("-");
  const Tok& t = peek();
  double v;
  if (t.k == Tok::K::Int)
    v = (double)next().i;
  else if (t.k == Tok::K::Float)
    v = next().f;
  else
    fail(std::string("expected number in ") + context);
  return neg ? -v : v;
}

void Stream::fail(const std::string& msg) const {
  throw ParseError(msg, peek().line);
}

}  // namespace qlsp::lex
