#include "plc/parser.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <cmath>
#include <optional>

#include "plc/error.hpp"

namespace plc {

namespace {

enum class Token {
  number,
  identifier,
  implies,   // :-
  annotate,  // ::
  comma,
  period,
  naf,  // \+
  bang,
  amp,
  pipe,
  lparen,
  rparen,
  end,
};

std::string_view describe(Token token) {
  switch (token) {
    case Token::number: return "number";
    case Token::identifier: return "identifier";
    case Token::implies: return "':-'";
    case Token::annotate: return "'::'";
    case Token::comma: return "','";
    case Token::period: return "'.'";
    case Token::naf: return "'\\+'";
    case Token::bang: return "'!'";
    case Token::amp: return "'&'";
    case Token::pipe: return "'|'";
    case Token::lparen: return "'('";
    case Token::rparen: return "')'";
    case Token::end: return "end of input";
  }
  return "token";
}

struct Lexeme {
  Token token = Token::end;
  std::string_view text;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Lexeme& peek() const { return current_; }

  Lexeme take() {
    Lexeme result = current_;
    advance();
    return result;
  }

  Lexeme expect(Token token) {
    if (current_.token != token) {
      fail(current_, "expected " + std::string(describe(token)) + ", found " + found(current_));
    }
    return take();
  }

  [[noreturn]] static void fail(const Lexeme& at, const std::string& message) {
    throw Error(ErrorCode::syntax,
                std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + message);
  }

  static std::string found(const Lexeme& lexeme) {
    if (lexeme.token == Token::end) return "end of input";
    return "'" + std::string(lexeme.text) + "'";
  }

 private:
  void skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void advance() {
    skip_blank();
    current_ = Lexeme{Token::end, {}, line_, column_};
    if (pos_ >= text_.size()) return;
    const std::size_t start = pos_;
    const char c = text_[pos_];
    auto single = [&](Token token, std::size_t width) {
      for (std::size_t i = 0; i < width; ++i) bump();
      current_.token = token;
      current_.text = text_.substr(start, width);
    };
    auto next_is = [&](char expected) {
      return pos_ + 1 < text_.size() && text_[pos_ + 1] == expected;
    };

    if (is_digit(c)) {
      while (pos_ < text_.size() && is_digit(text_[pos_])) bump();
      if (pos_ + 1 < text_.size() && text_[pos_] == '.' && is_digit(text_[pos_ + 1])) {
        bump();
        while (pos_ < text_.size() && is_digit(text_[pos_])) bump();
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t look = pos_ + 1;
        if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
        if (look < text_.size() && is_digit(text_[look])) {
          while (pos_ < look) bump();
          while (pos_ < text_.size() && is_digit(text_[pos_])) bump();
        }
      }
      current_.token = Token::number;
      current_.text = text_.substr(start, pos_ - start);
    } else if (is_ident_char(c)) {
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) bump();
      current_.token = Token::identifier;
      current_.text = text_.substr(start, pos_ - start);
    } else if (c == ':' && next_is('-')) {
      single(Token::implies, 2);
    } else if (c == ':' && next_is(':')) {
      single(Token::annotate, 2);
    } else if (c == '\\' && next_is('+')) {
      single(Token::naf, 2);
    } else if (c == ',') {
      single(Token::comma, 1);
    } else if (c == '.') {
      single(Token::period, 1);
    } else if (c == '!') {
      single(Token::bang, 1);
    } else if (c == '&') {
      single(Token::amp, 1);
    } else if (c == '|') {
      single(Token::pipe, 1);
    } else if (c == '(') {
      single(Token::lparen, 1);
    } else if (c == ')') {
      single(Token::rparen, 1);
    } else {
      Lexeme bad{Token::end, text_.substr(start, 1), line_, column_};
      fail(bad, "unexpected character '" + std::string(bad.text) + "'");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  Lexeme current_;
};

std::string take_name(Lexer& lexer) {
  const Lexeme lexeme = lexer.peek();
  if (lexeme.token != Token::identifier) {
    Lexer::fail(lexeme, "expected proposition name, found " + Lexer::found(lexeme));
  }
  lexer.take();
  std::string name(lexeme.text);
  if (!is_valid_name(name)) {
    Lexer::fail(lexeme, "'" + name +
                            "' is not a proposition name (must start with a lowercase letter; "
                            "variables are not supported)");
  }
  return name;
}

double take_probability(Lexer& lexer) {
  const Lexeme lexeme = lexer.expect(Token::number);
  double value = 0.0;
  auto [end, ec] = std::from_chars(lexeme.text.data(), lexeme.text.data() + lexeme.text.size(),
                                   value);
  if (ec != std::errc() || end != lexeme.text.data() + lexeme.text.size()) {
    Lexer::fail(lexeme, "malformed probability '" + std::string(lexeme.text) + "'");
  }
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::probability_range,
                std::to_string(lexeme.line) + ":" + std::to_string(lexeme.column) +
                    ": probability " + std::string(lexeme.text) + " is outside [0, 1]");
  }
  return value;
}

Literal take_literal(Lexer& lexer) {
  bool positive = true;
  if (lexer.peek().token == Token::naf) {
    lexer.take();
    positive = false;
  }
  return {take_name(lexer), positive};
}

std::string location(const Lexeme& lexeme) {
  return std::to_string(lexeme.line) + ":" + std::to_string(lexeme.column) + ": ";
}

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Program* program) : lexer_(text), program_(program) {}

  Formula parse() {
    Formula result = disjunction();
    if (lexer_.peek().token != Token::end) {
      Lexer::fail(lexer_.peek(), "unexpected " + Lexer::found(lexer_.peek()));
    }
    return result;
  }

 private:
  Formula disjunction() {
    Formula result = conjunction();
    while (lexer_.peek().token == Token::pipe) {
      lexer_.take();
      result = Formula::disjunction(result, conjunction());
    }
    return result;
  }

  Formula conjunction() {
    Formula result = unary();
    while (lexer_.peek().token == Token::amp) {
      lexer_.take();
      result = Formula::conjunction(result, unary());
    }
    return result;
  }

  Formula unary() {
    const Lexeme lexeme = lexer_.peek();
    switch (lexeme.token) {
      case Token::bang:
      case Token::naf:
        lexer_.take();
        return Formula::negation(unary());
      case Token::lparen: {
        lexer_.take();
        Formula inner = disjunction();
        lexer_.expect(Token::rparen);
        return inner;
      }
      case Token::identifier:
        if (lexeme.text == "true" || lexeme.text == "false") {
          lexer_.take();
          return Formula::constant(lexeme.text == "true");
        }
        return atom();
      default:
        Lexer::fail(lexeme, "expected formula, found " + Lexer::found(lexeme));
    }
  }

  Formula atom() {
    const Lexeme lexeme = lexer_.peek();
    std::string name = take_name(lexer_);
    if (program_ != nullptr && !program_->contains(name)) {
      const auto externals = desugar(*program_).externals();
      if (std::find(externals.begin(), externals.end(), name) != externals.end()) {
        throw Error(ErrorCode::external_proposition,
                    location(lexeme) + "'" + name +
                        "' is an external proposition and cannot be queried");
      }
      throw Error(ErrorCode::unknown_proposition,
                  location(lexeme) + "unknown proposition '" + name + "'");
    }
    return Formula::atom(std::move(name));
  }

  Lexer lexer_;
  const Program* program_;
};

}  // namespace

Program parse_program(std::string_view text) {
  Lexer lexer(text);
  std::vector<Clause> clauses;
  std::set<std::pair<std::string, std::vector<Literal>>> seen;
  while (lexer.peek().token != Token::end) {
    const Lexeme start = lexer.peek();
    Clause clause;
    clause.probability = take_probability(lexer);
    lexer.expect(Token::annotate);
    clause.effect = take_name(lexer);
    if (lexer.peek().token == Token::implies) {
      lexer.take();
      clause.causes.push_back(take_literal(lexer));
      while (lexer.peek().token == Token::comma) {
        lexer.take();
        clause.causes.push_back(take_literal(lexer));
      }
    }
    lexer.expect(Token::period);
    try {
      // Validates this clause on its own so errors point at it.
      Program single({clause});
      clause = single.clauses().front();
    } catch (const Error& error) {
      throw Error(error.code(), location(start) + error.what());
    }
    if (!seen.emplace(clause.effect, clause.causes).second) {
      throw Error(ErrorCode::duplicate_clause,
                  location(start) + "duplicate clause for '" + clause.effect +
                      "' with the same causes");
    }
    clauses.push_back(std::move(clause));
  }
  return Program(std::move(clauses));
}

std::string format_probability(double probability) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, probability);
  std::string text(buffer, ec == std::errc() ? end : buffer);
  if (text.find_first_of(".eE") == std::string::npos && std::isfinite(probability)) {
    text += ".0";
  }
  return text;
}

std::string print_program(const Program& program) {
  std::string out;
  for (const auto& clause : program.clauses()) {
    out += format_probability(clause.probability);
    out += " :: ";
    out += clause.effect;
    for (std::size_t i = 0; i < clause.causes.size(); ++i) {
      out += i == 0 ? " :- " : ", ";
      out += to_string(clause.causes[i]);
    }
    out += ".\n";
  }
  return out;
}

Formula parse_formula(std::string_view text, const Program& program) {
  return FormulaParser(text, &program).parse();
}

Formula parse_formula(std::string_view text) { return FormulaParser(text, nullptr).parse(); }

std::map<std::string, bool> parse_assignment(std::string_view text, const Program& program) {
  std::map<std::string, bool> assignment;
  Lexer lexer(text);
  if (lexer.peek().token == Token::end) return assignment;
  while (true) {
    const Lexeme start = lexer.peek();
    Literal literal = take_literal(lexer);
    if (!program.contains(literal.atom)) {
      throw Error(ErrorCode::unknown_proposition,
                  location(start) + "unknown proposition '" + literal.atom + "'");
    }
    auto [it, inserted] = assignment.emplace(literal.atom, literal.positive);
    if (!inserted) {
      throw Error(ErrorCode::invalid_argument,
                  location(start) + "proposition '" + literal.atom + "' assigned twice");
    }
    if (lexer.peek().token == Token::end) break;
    lexer.expect(Token::comma);
  }
  return assignment;
}

}  // namespace plc
