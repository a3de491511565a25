// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "condtrap/parser.hpp"

#include <cctype>
#include <string>
#include <utility>
#include <vector>

namespace condtrap {

namespace {

struct Token {
  enum class Kind {
    Ident,
    Number,
    Directive,
    LParen,
    RParen,
    Bang,
    AndAnd,
    OrOr,
    Rel,
    Comma,
    Newline,
    Eof,
  };

  Kind kind = Kind::Eof;
  std::string text;       // Ident / Directive spelling
  uint32_t value = 0;     // Number
  RelOp rel = RelOp::Eq;  // Rel
  std::size_t offset = 0;
  std::size_t length = 0;
  int line = 1;
  int col = 1;
};

[[noreturn]] void fail(const Token& at, const std::string& message) {
  throw ParseError(at.line, at.col, message);
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      if (c == '\n') {
        Token t = begin(Token::Kind::Newline);
        advance();
        t.length = 1;
        out.push_back(std::move(t));
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back(ident());
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back(number());
        continue;
      }
      if (c == '.') {
        out.push_back(directive());
        continue;
      }
      out.push_back(punct());
    }
    Token eof = begin(Token::Kind::Eof);
    out.push_back(std::move(eof));
    return out;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  // A token positioned at the current cursor, length zero until finished.
  Token begin(Token::Kind kind) const {
    Token t;
    t.kind = kind;
    t.offset = pos_;
    t.line = line_;
    t.col = col_;
    return t;
  }

  char peek_next() const { return pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0'; }

  Token ident() {
    Token t = begin(Token::Kind::Ident);
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        advance();
      } else {
        break;
      }
    }
    t.length = pos_ - t.offset;
    t.text = std::string(src_.substr(t.offset, t.length));
    return t;
  }

  Token number() {
    Token t = begin(Token::Kind::Number);
    uint64_t value = 0;
    if (src_[pos_] == '0' && (peek_next() == 'x' || peek_next() == 'X')) {
      advance();
      advance();
      bool any = false;
      while (pos_ < src_.size() &&
             std::isxdigit(static_cast<unsigned char>(src_[pos_]))) {
        const char c = src_[pos_];
        int digit = std::isdigit(static_cast<unsigned char>(c))
                        ? c - '0'
                        : 10 + (std::tolower(static_cast<unsigned char>(c)) - 'a');
        value = value * 16 + static_cast<uint64_t>(digit);
        any = true;
        if (value > 0xFFFFFFFFull) fail(t, "immediate does not fit in 32 bits");
        advance();
      }
      if (!any) fail(t, "expected hexadecimal digits after '0x'");
    } else {
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        value = value * 10 + static_cast<uint64_t>(src_[pos_] - '0');
        if (value > 0xFFFFFFFFull) fail(t, "immediate does not fit in 32 bits");
        advance();
      }
    }
    t.length = pos_ - t.offset;
    t.text = std::string(src_.substr(t.offset, t.length));
    t.value = static_cast<uint32_t>(value);
    return t;
  }

  Token directive() {
    Token t = begin(Token::Kind::Directive);
    advance();  // '.'
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        advance();
      } else {
        break;
      }
    }
    t.length = pos_ - t.offset;
    t.text = std::string(src_.substr(t.offset, t.length));
    if (t.text != ".if" && t.text != ".elseif" && t.text != ".else" &&
        t.text != ".endif") {
      fail(t, "unknown directive '" + t.text + "'");
    }
    return t;
  }

  Token rel(Token t, RelOp op, std::size_t length) {
    t.kind = Token::Kind::Rel;
    t.rel = op;
    t.length = length;
    return t;
  }

  Token punct() {
    Token t = begin(Token::Kind::Eof);
    const char c = src_[pos_];
    switch (c) {
      case '(':
        advance();
        t.kind = Token::Kind::LParen;
        t.length = 1;
        return t;
      case ')':
        advance();
        t.kind = Token::Kind::RParen;
        t.length = 1;
        return t;
      case ',':
        advance();
        t.kind = Token::Kind::Comma;
        t.length = 1;
        return t;
      case '!':
        advance();
        if (pos_ < src_.size() && src_[pos_] == '=') {
          advance();
          return rel(std::move(t), RelOp::Ne, 2);
        }
        t.kind = Token::Kind::Bang;
        t.length = 1;
        return t;
      case '=':
        advance();
        if (pos_ < src_.size() && src_[pos_] == '=') {
          advance();
          return rel(std::move(t), RelOp::Eq, 2);
        }
        fail(t, "unexpected '='; comparisons are written '=='");
      case '<':
        advance();
        if (pos_ < src_.size() && src_[pos_] == '=') {
          advance();
          return rel(std::move(t), RelOp::Le, 2);
        }
        return rel(std::move(t), RelOp::Lt, 1);
      case '>':
        advance();
        if (pos_ < src_.size() && src_[pos_] == '=') {
          advance();
          return rel(std::move(t), RelOp::Ge, 2);
        }
        return rel(std::move(t), RelOp::Gt, 1);
      case '&':
        advance();
        if (pos_ < src_.size() && src_[pos_] == '&') {
          advance();
          t.kind = Token::Kind::AndAnd;
          t.length = 2;
          return t;
        }
        fail(t, "unexpected '&'; conjunction is written '&&'");
      case '|':
        advance();
        if (pos_ < src_.size() && src_[pos_] == '|') {
          advance();
          t.kind = Token::Kind::OrOr;
          t.length = 2;
          return t;
        }
        fail(t, "unexpected '|'; disjunction is written '||'");
      default:
        fail(t, std::string("unexpected character '") + c + "'");
    }
  }
};

Span token_span(const Token& t) { return Span{t.offset, t.length, t.line, t.col}; }

Span join_spans(const Span& from, const Span& to) {
  return Span{from.offset, to.offset + to.length - from.offset, from.line, from.col};
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  CondExpr parse_condition_source() {
    CondExpr e = parse_or();
    const Token& t = peek();
    if (t.kind != Token::Kind::Eof) fail(t, "unexpected text after the condition");
    return e;
  }

  IfBlock parse_block_source() {
    skip_newlines();
    const Token& head = peek();
    if (head.kind != Token::Kind::Directive || head.text != ".if") {
      fail(head, "expected '.if' to open the block");
    }
    next();

    IfBlock block;
    block.cond = parse_or();
    expect_end_of_line();
    block.then_body.id = "then_0";

    Body* current = &block.then_body;
    bool seen_else = false;
    bool closed = false;
    while (!closed) {
      const Token& t = peek();
      switch (t.kind) {
        case Token::Kind::Eof:
          fail(t, "missing '.endif'");
        case Token::Kind::Newline:
          next();
          break;
        case Token::Kind::Directive:
          if (t.text == ".elseif") {
            if (seen_else) fail(t, "'.elseif' cannot follow '.else'");
            next();
            CondExpr cond = parse_or();
            expect_end_of_line();
            block.elseifs.emplace_back(std::move(cond), Body{});
            Body& body = block.elseifs.back().second;
            body.id = "elseif_" + std::to_string(block.elseifs.size());
            current = &body;
          } else if (t.text == ".else") {
            if (seen_else) fail(t, "duplicate '.else'");
            next();
            expect_end_of_line();
            seen_else = true;
            block.else_body = Body{};
            block.else_body->id =
                "else_" + std::to_string(block.elseifs.size() + 1);
            current = &*block.else_body;
          } else if (t.text == ".endif") {
            next();
            closed = true;
          } else {
            fail(t, "nested '.if' is not supported");
          }
          break;
        case Token::Kind::Ident:
          current->stmts.push_back(parse_statement());
          break;
        default:
          fail(t, "expected a statement or directive");
      }
    }

    skip_newlines();
    const Token& tail = peek();
    if (tail.kind != Token::Kind::Eof) fail(tail, "unexpected text after '.endif'");
    return block;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;

  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  void skip_newlines() {
    while (peek().kind == Token::Kind::Newline) next();
  }

  // Consumes a line ending.  EOF is acceptable: a block missing its
  // terminating directive reports 'missing .endif' at the block level.
  void expect_end_of_line() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Newline) {
      next();
      return;
    }
    if (t.kind == Token::Kind::Eof) return;
    fail(t, "expected end of line");
  }

  BodyStmt parse_statement() {
    Token name = next();
    BodyStmt s;
    if (name.text == "nop") {
      s.kind = BodyStmt::Kind::Nop;
    } else if (name.text == "mov" || name.text == "add") {
      s.kind = name.text == "mov" ? BodyStmt::Kind::Mov : BodyStmt::Kind::Add;
      const Token& r = peek();
      if (r.kind != Token::Kind::Ident || !is_register(r.text)) {
        fail(r, "expected a register after '" + name.text + "'");
      }
      s.reg = r.text;
      next();
      const Token& comma = peek();
      if (comma.kind != Token::Kind::Comma) fail(comma, "expected ','");
      next();
      const Token& imm = peek();
      if (imm.kind != Token::Kind::Number) fail(imm, "expected an immediate");
      s.imm = imm.value;
      next();
    } else {
      fail(name, "unknown statement '" + name.text + "'");
    }
    expect_end_of_line();
    return s;
  }

  CondExpr parse_or() {
    CondExpr lhs = parse_and();
    while (peek().kind == Token::Kind::OrOr) {
      next();
      CondExpr rhs = parse_and();
      Span span = join_spans(lhs.span, rhs.span);
      lhs = make_or(std::move(lhs), std::move(rhs));
      lhs.span = span;
    }
    return lhs;
  }

  CondExpr parse_and() {
    CondExpr lhs = parse_rel();
    while (peek().kind == Token::Kind::AndAnd) {
      next();
      CondExpr rhs = parse_rel();
      Span span = join_spans(lhs.span, rhs.span);
      lhs = make_and(std::move(lhs), std::move(rhs));
      lhs.span = span;
    }
    return lhs;
  }

  CondExpr parse_rel() {
    CondExpr first = parse_unary();
    if (peek().kind != Token::Kind::Rel) return first;
    const Token op = next();
    CondExpr second = parse_unary();
    if (peek().kind == Token::Kind::Rel) {
      fail(peek(), "chained comparison; parenthesize one side");
    }
    Span span = join_spans(first.span, second.span);
    NotOperand lhs = fold_operand(std::move(first), "left");
    NotOperand rhs = fold_operand(std::move(second), "right");
    CondExpr e = make_rel(op.rel, std::move(lhs), std::move(rhs));
    e.span = span;
    return e;
  }

  // A comparison side must be an operand with its bangs written directly
  // against it; redundant parentheses around that are fine, anything else
  // (a bang in front of a parenthesis, a boolean expression, another
  // comparison) is not an operand.
  NotOperand fold_operand(CondExpr&& e, const char* side) {
    CondExpr* cur = &e;
    while (auto* paren = std::get_if<ParenExpr>(&cur->node)) {
      cur = paren->inner.get();
    }
    if (auto* bare = std::get_if<BareTest>(&cur->node)) {
      return std::move(bare->test);
    }
    throw ParseError(e.span.line, e.span.col,
                     std::string(side) + " side of a comparison must be an operand");
  }

  CondExpr parse_unary() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Bang) {
      std::vector<Token> bangs;
      while (peek().kind == Token::Kind::Bang) bangs.push_back(next());
      const Token& after = peek();
      if (after.kind == Token::Kind::LParen) {
        CondExpr e = parse_paren();
        for (std::size_t i = bangs.size(); i-- > 0;) {
          Span span = join_spans(token_span(bangs[i]), e.span);
          e = make_not(std::move(e));
          e.span = span;
        }
        return e;
      }
      if (after.kind == Token::Kind::Ident || after.kind == Token::Kind::Number) {
        const Token operand = next();
        NotOperand no;
        no.negations = static_cast<int>(bangs.size());
        no.operand = to_operand(operand);
        no.span = join_spans(token_span(bangs.front()), token_span(operand));
        no.bang_span = join_spans(token_span(bangs.front()), token_span(bangs.back()));
        Span span = no.span;
        CondExpr e = make_bare(std::move(no));
        e.span = span;
        return e;
      }
      fail(after, "expected an operand or '(' after '!'");
    }
    if (t.kind == Token::Kind::LParen) return parse_paren();
    if (t.kind == Token::Kind::Ident || t.kind == Token::Kind::Number) {
      const Token operand = next();
      NotOperand no;
      no.operand = to_operand(operand);
      no.span = token_span(operand);
      no.bang_span = Span{operand.offset, 0, operand.line, operand.col};
      Span span = no.span;
      CondExpr e = make_bare(std::move(no));
      e.span = span;
      return e;
    }
    fail(t, "expected a condition");
  }

  CondExpr parse_paren() {
    const Token lparen = next();
    CondExpr inner = parse_or();
    const Token& closing = peek();
    if (closing.kind != Token::Kind::RParen) fail(closing, "expected ')'");
    const Token rparen = next();
    CondExpr e = make_paren(std::move(inner));
    e.span = join_spans(token_span(lparen), token_span(rparen));
    return e;
  }

  static Operand to_operand(const Token& t) {
    if (t.kind == Token::Kind::Number) return Operand::imm(t.value);
    return Operand::named(t.text);
  }
};

}  // namespace

IfBlock parse_block(std::string_view source) {
  Parser parser(Lexer(source).tokenize());
  return parser.parse_block_source();
}

CondExpr parse_condition(std::string_view source) {
  Parser parser(Lexer(source).tokenize());
  return parser.parse_condition_source();
}

}  // namespace condtrap
