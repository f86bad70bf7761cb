#include "epsub/parse.hpp"

#include "epsub/detail/lexer.hpp"

#include <algorithm>
#include <set>

namespace epsub {

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

class FoParser {
public:
  FoParser(const std::string& text, ParseContext& ctx) : lex_(text), ctx_(ctx) {}

  FormulaPtr formula_entry() {
    auto f = formula();
    lex_.expect(Tok::End, "end of input");
    return f;
  }

  TermPtr term_entry() {
    auto t = term();
    lex_.expect(Tok::End, "end of input");
    return t;
  }

  SystemFile system_file() {
    SystemFile out;
    parse_lets();
    lex_.expect(Tok::KwSystem, "'system'");
    lex_.expect(Tok::LBrace, "'{'");
    while (!lex_.at(Tok::RBrace)) {
      out.formulas.push_back(formula());
      if (!lex_.accept(Tok::Semi)) break;
    }
    lex_.expect(Tok::RBrace, "'}'");
    lex_.expect(Tok::End, "end of input");
    out.warnings = ctx_.warnings;
    out.symbols = ctx_.symbols;
    for (const auto& [name, t] : ctx_.lets) out.lets.emplace_back(name, t);
    return out;
  }

  FormulaPtr formula_file() {
    parse_lets();
    return formula_entry();
  }

private:
  Lexer lex_;
  ParseContext& ctx_;
  std::vector<std::string> binders_; // innermost last
  std::set<std::string> warned_;

  void parse_lets() {
    while (lex_.accept(Tok::KwLet)) {
      Token name = lex_.expect(Tok::Ident, "abbreviation name");
      if (ctx_.lets.count(name.text))
        throw ParseError("abbreviation '" + name.text + "' redefined", name.pos);
      lex_.expect(Tok::Equals, "'='");
      ctx_.lets[name.text] = term();
    }
  }

  void declare_symbol(std::map<std::string, unsigned>& table, const Token& name, unsigned arity,
                      const char* what) {
    auto it = table.find(name.text);
    if (it == table.end()) {
      table.emplace(name.text, arity);
    } else if (it->second != arity) {
      throw ParseError(std::string(what) + " '" + name.text + "' used with arity " +
                           std::to_string(arity) + " but declared with arity " +
                           std::to_string(it->second),
                       name.pos);
    }
  }

  FormulaPtr formula() { return implication(); }

  FormulaPtr implication() {
    auto lhs = or_chain();
    if (lex_.accept(Tok::Arrow)) return implies(lhs, implication());
    return lhs;
  }

  FormulaPtr or_chain() {
    auto f = and_chain();
    while (lex_.accept(Tok::Pipe)) f = disj(f, and_chain());
    return f;
  }

  FormulaPtr and_chain() {
    auto f = negation();
    while (lex_.accept(Tok::Amp)) f = conj(f, negation());
    return f;
  }

  FormulaPtr negation() {
    if (lex_.accept(Tok::Tilde)) return neg(negation());
    return primary();
  }

  FormulaPtr primary() {
    if (lex_.accept(Tok::LParen)) {
      auto f = formula();
      lex_.expect(Tok::RParen, "')'");
      return f;
    }
    if (lex_.at(Tok::KwExists) || lex_.at(Tok::KwForall)) {
      bool ex = lex_.next().kind == Tok::KwExists;
      Token v = lex_.expect(Tok::Ident, "bound variable");
      lex_.expect(Tok::Dot, "'.'");
      binders_.push_back(v.text);
      auto body = formula();
      binders_.pop_back();
      return ex ? exists_raw(v.text, body) : forall_raw(v.text, body);
    }
    if (lex_.at(Tok::Ident)) {
      Token name = lex_.next();
      std::vector<TermPtr> args;
      if (lex_.accept(Tok::LParen)) {
        args.push_back(term());
        while (lex_.accept(Tok::Comma)) args.push_back(term());
        lex_.expect(Tok::RParen, "')'");
      }
      declare_symbol(ctx_.symbols.predicates, name, static_cast<unsigned>(args.size()), "predicate");
      return atom(name.text, std::move(args));
    }
    if (lex_.at(Tok::KwEps) || lex_.at(Tok::KwEPS) || lex_.at(Tok::KwLam))
      throw ParseError("a term or second-order construct cannot appear where a formula is expected",
                       lex_.peek().pos);
    throw ParseError("expected a formula, found '" + Lexer::describe(lex_.peek()) + "'",
                     lex_.peek().pos);
  }

  TermPtr term() {
    if (lex_.at(Tok::Number)) return fun(lex_.next().text, {});
    if (lex_.at(Tok::KwEps)) {
      lex_.next();
      Token v = lex_.expect(Tok::Ident, "bound variable");
      lex_.expect(Tok::Dot, "'.'");
      binders_.push_back(v.text);
      auto body = formula();
      binders_.pop_back();
      return eps_raw(v.text, body);
    }
    if (lex_.accept(Tok::LParen)) {
      auto t = term();
      lex_.expect(Tok::RParen, "')'");
      return t;
    }
    if (lex_.at(Tok::Ident)) {
      Token name = lex_.next();
      if (lex_.accept(Tok::LParen)) {
        std::vector<TermPtr> args;
        args.push_back(term());
        while (lex_.accept(Tok::Comma)) args.push_back(term());
        lex_.expect(Tok::RParen, "')'");
        declare_symbol(ctx_.symbols.functions, name, static_cast<unsigned>(args.size()), "function");
        return fun(name.text, std::move(args));
      }
      // bound variable?
      for (std::size_t k = 0; k < binders_.size(); ++k) {
        std::size_t i = binders_.size() - 1 - k;
        if (binders_[i] == name.text) return bound(static_cast<unsigned>(k));
      }
      // abbreviation?
      auto it = ctx_.lets.find(name.text);
      if (it != ctx_.lets.end()) return it->second;
      // free variable
      if (warned_.insert(name.text).second)
        ctx_.warnings.push_back(Warning{name.pos, "free variable '" + name.text + "'"});
      return var(name.text);
    }
    throw ParseError("expected a term, found '" + Lexer::describe(lex_.peek()) + "'",
                     lex_.peek().pos);
  }
};

} // namespace

FormulaPtr parse_formula(const std::string& text, ParseContext* ctx) {
  ParseContext local;
  FoParser p(text, ctx ? *ctx : local);
  return p.formula_entry();
}

TermPtr parse_term(const std::string& text, ParseContext* ctx) {
  ParseContext local;
  FoParser p(text, ctx ? *ctx : local);
  return p.term_entry();
}

std::variant<FormulaPtr, TermPtr> parse_any(const std::string& text, ParseContext* ctx) {
  Lexer probe(text);
  if (probe.at(Tok::KwEps)) return parse_term(text, ctx);
  try {
    return parse_formula(text, ctx);
  } catch (const ParseError&) {
    return parse_term(text, ctx);
  }
}

SystemFile parse_system_file(const std::string& text) {
  ParseContext ctx;
  FoParser p(text, ctx);
  return p.system_file();
}

FormulaPtr parse_formula_file(const std::string& text, ParseContext* ctx) {
  ParseContext local;
  FoParser p(text, ctx ? *ctx : local);
  return p.formula_file();
}

} // namespace epsub
