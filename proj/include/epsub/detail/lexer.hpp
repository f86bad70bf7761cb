#pragma once

// Shared token stream for the first- and second-order parsers.

#include "epsub/parse.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace epsub::detail {

enum class Tok {
  Ident, Number,
  LParen, RParen, Comma, Dot, Semi, LBrace, RBrace, Equals,
  Arrow, Pipe, Amp, Tilde,
  KwEps, KwExists, KwForall, KwLam, KwEPS, KwLet, KwSystem,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

class Lexer {
public:
  explicit Lexer(const std::string& text) { tokenize(text); }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = idx_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  Token next() {
    Token t = peek();
    if (idx_ < tokens_.size() - 1) ++idx_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  Token expect(Tok k, const std::string& what) {
    if (!at(k)) throw ParseError("expected " + what + ", found '" + describe(peek()) + "'", peek().pos);
    return next();
  }

  static std::string describe(const Token& t) {
    return t.kind == Tok::End ? "end of input" : t.text;
  }

private:
  std::vector<Token> tokens_;
  std::size_t idx_ = 0;

  void tokenize(const std::string& s) {
    SourcePos pos;
    std::size_t i = 0;
    auto push = [&](Tok k, std::string text, SourcePos p) {
      tokens_.push_back(Token{k, std::move(text), p});
    };
    while (i < s.size()) {
      char c = s[i];
      if (c == '\n') { ++pos.line; pos.col = 1; ++i; continue; }
      if (c == ' ' || c == '\t' || c == '\r') { ++pos.col; ++i; continue; }
      if (c == '#') {
        while (i < s.size() && s[i] != '\n') ++i;
        continue;
      }
      SourcePos start = pos;
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        std::string word = s.substr(i, j - i);
        pos.col += static_cast<int>(j - i);
        i = j;
        if (word == "eps") push(Tok::KwEps, word, start);
        else if (word == "exists") push(Tok::KwExists, word, start);
        else if (word == "forall") push(Tok::KwForall, word, start);
        else if (word == "lam") push(Tok::KwLam, word, start);
        else if (word == "EPS") push(Tok::KwEPS, word, start);
        else if (word == "let") push(Tok::KwLet, word, start);
        else if (word == "system") push(Tok::KwSystem, word, start);
        else push(Tok::Ident, word, start);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        push(Tok::Number, s.substr(i, j - i), start);
        pos.col += static_cast<int>(j - i);
        i = j;
        continue;
      }
      if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
        push(Tok::Arrow, "->", start);
        pos.col += 2;
        i += 2;
        continue;
      }
      Tok k;
      switch (c) {
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case ',': k = Tok::Comma; break;
        case '.': k = Tok::Dot; break;
        case ';': k = Tok::Semi; break;
        case '{': k = Tok::LBrace; break;
        case '}': k = Tok::RBrace; break;
        case '=': k = Tok::Equals; break;
        case '|': k = Tok::Pipe; break;
        case '&': k = Tok::Amp; break;
        case '~': k = Tok::Tilde; break;
        default:
          throw ParseError(std::string("unexpected character '") + c + "'", start);
      }
      push(k, std::string(1, c), start);
      ++pos.col;
      ++i;
    }
    tokens_.push_back(Token{Tok::End, "", pos});
  }
};

} // namespace epsub::detail
