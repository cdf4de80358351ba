#include "bdstab/rate_dsl.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

#include "bdstab/errors.hpp"
#include "bdstab/vec.hpp"

namespace bdstab {

namespace {

constexpr std::size_t kMaxTextBytes = 64 * 1024;
constexpr int kMaxDepth = 200;

enum class Tok { Number, Ident, LParen, RParen, Comma, Plus, Minus, Star, Slash, End };

struct Token {
  Tok kind;
  std::string_view text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

struct FunctionInfo {
  std::string_view name;
  RateExpr::Op op;
  int arity;
};

constexpr std::array<FunctionInfo, 6> kFunctions{{
    {"log", RateExpr::Op::Log, 1},
    {"exp", RateExpr::Op::Exp, 1},
    {"sqrt", RateExpr::Op::Sqrt, 1},
    {"pow", RateExpr::Op::Pow, 2},
    {"min", RateExpr::Op::Min, 2},
    {"max", RateExpr::Op::Max, 2},
}};

std::optional<FunctionInfo> lookup_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return f;
  return std::nullopt;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= text_.size()) {
      t.kind = Tok::End;
      return t;
    }
    const char c = text_[pos_];
    const std::size_t start = pos_;
    if (is_digit(c) || (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]))) {
      while (pos_ < text_.size() && (is_digit(text_[pos_]) || text_[pos_] == '.')) advance();
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t look = pos_ + 1;
        if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
        if (look < text_.size() && is_digit(text_[look])) {
          while (pos_ < look) advance();
          while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
        }
      }
      t.kind = Tok::Number;
      t.text = text_.substr(start, pos_ - start);
      const auto* first = t.text.data();
      const auto* last = first + t.text.size();
      auto [ptr, ec] = std::from_chars(first, last, t.number);
      if (ec != std::errc() || ptr != last) throw ParseError("malformed number '" + std::string(t.text) + "'", t.line, t.column);
      return t;
    }
    if (is_ident_start(c)) {
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
      t.kind = Tok::Ident;
      t.text = text_.substr(start, pos_ - start);
      return t;
    }
    advance();
    t.text = text_.substr(start, 1);
    switch (c) {
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case ',': t.kind = Tok::Comma; break;
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '*': t.kind = Tok::Star; break;
      case '/': t.kind = Tok::Slash; break;
      default: throw ParseError("unexpected character '" + std::string(1, c) + "'", t.line, t.column);
    }
    return t;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

int precedence(RateExpr::Op op) {
  switch (op) {
    case RateExpr::Op::Add:
    case RateExpr::Op::Sub: return 1;
    case RateExpr::Op::Mul:
    case RateExpr::Op::Div: return 2;
    case RateExpr::Op::Neg: return 3;
    default: return 4;
  }
}

}  // namespace

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { current_ = lexer_.next(); }

  RateExpr run() {
    expr_.root_ = parse_expr(0);
    if (current_.kind != Tok::End) {
      if (current_.kind == Tok::RParen) throw ParseError("unbalanced ')'", current_.line, current_.column);
      throw ParseError("unexpected " + describe(current_), current_.line, current_.column);
    }
    return std::move(expr_);
  }

 private:
  using Op = RateExpr::Op;

  std::int32_t add(RateExpr::Node n) {
    expr_.nodes_.push_back(n);
    return static_cast<std::int32_t>(expr_.nodes_.size() - 1);
  }

  void bump() { current_ = lexer_.next(); }

  void enter(int depth) const {
    if (depth > kMaxDepth) throw ParseError("expression nested too deeply", current_.line, current_.column);
  }

  std::int32_t parse_expr(int depth) {
    enter(depth);
    std::int32_t lhs = parse_term(depth + 1);
    while (current_.kind == Tok::Plus || current_.kind == Tok::Minus) {
      const Op op = current_.kind == Tok::Plus ? Op::Add : Op::Sub;
      bump();
      const std::int32_t rhs = parse_term(depth + 1);
      lhs = add({op, 0.0, 0, lhs, rhs});
    }
    return lhs;
  }

  std::int32_t parse_term(int depth) {
    enter(depth);
    std::int32_t lhs = parse_factor(depth + 1);
    while (current_.kind == Tok::Star || current_.kind == Tok::Slash) {
      const Op op = current_.kind == Tok::Star ? Op::Mul : Op::Div;
      bump();
      const std::int32_t rhs = parse_factor(depth + 1);
      lhs = add({op, 0.0, 0, lhs, rhs});
    }
    return lhs;
  }

  std::int32_t parse_factor(int depth) {
    enter(depth);
    const Token t = current_;
    switch (t.kind) {
      case Tok::Number:
        bump();
        return add({Op::Number, t.number});
      case Tok::Minus: {
        bump();
        const std::int32_t operand = parse_factor(depth + 1);
        return add({Op::Neg, 0.0, 0, operand});
      }
      case Tok::LParen: {
        bump();
        const std::int32_t inner = parse_expr(depth + 1);
        if (current_.kind != Tok::RParen) {
          throw ParseError("unbalanced '(': expected ')', found " + describe(current_), current_.line, current_.column);
        }
        bump();
        return inner;
      }
      case Tok::Ident:
        bump();
        return parse_identifier(t, depth);
      case Tok::End:
        throw ParseError("unexpected end of input", t.line, t.column);
      case Tok::RParen:
        throw ParseError("unbalanced ')'", t.line, t.column);
      default:
        throw ParseError("unexpected " + describe(t), t.line, t.column);
    }
  }

  std::int32_t parse_identifier(const Token& t, int depth) {
    if (t.text == "norm") return add({Op::Norm});
    if (t.text.size() >= 2 && t.text[0] == 'x') {
      const auto digits = t.text.substr(1);
      unsigned long idx = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && idx >= 1 && digits[0] != '0') {
        return add({Op::Var, 0.0, static_cast<std::uint32_t>(idx - 1)});
      }
    }
    const auto fn = lookup_function(t.text);
    if (!fn) throw ParseError("unknown identifier '" + std::string(t.text) + "'", t.line, t.column);
    if (current_.kind != Tok::LParen) {
      throw ParseError("expected '(' after function '" + std::string(t.text) + "'", current_.line, current_.column);
    }
    bump();
    std::vector<std::int32_t> args;
    if (current_.kind != Tok::RParen) {
      args.push_back(parse_expr(depth + 1));
      while (current_.kind == Tok::Comma) {
        bump();
        args.push_back(parse_expr(depth + 1));
      }
    }
    if (current_.kind != Tok::RParen) {
      throw ParseError("unbalanced '(': expected ')', found " + describe(current_), current_.line, current_.column);
    }
    bump();
    if (static_cast<int>(args.size()) != fn->arity) {
      throw ParseError("function '" + std::string(fn->name) + "' takes " + std::to_string(fn->arity) +
                           " argument(s), got " + std::to_string(args.size()),
                       t.line, t.column);
    }
    return add({fn->op, 0.0, 0, args[0], fn->arity == 2 ? args[1] : -1});
  }

  Lexer lexer_;
  Token current_;
  RateExpr expr_;
};

RateExpr parse(std::string_view text) {
  if (text.size() > kMaxTextBytes) throw ParseError("expression longer than 64 KiB", 1, 1);
  bool blank = true;
  for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (blank) throw ParseError("empty expression", 1, 1);
  return Parser(text).run();
}

double RateExpr::evaluate(std::span<const double> x) const {
  if (root_ < 0) throw ContractError("evaluating an empty expression");
  return eval_node(root_, x, norm(x));
}

double RateExpr::eval_node(std::int32_t i, std::span<const double> x, double r) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  auto fail = [&](const std::string& what) -> double { throw EvalError(what, print_subtree(i)); };
  auto checked = [&](double v) {
    if (!std::isfinite(v)) fail("non-finite result");
    return v;
  };
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::Var:
      if (n.index >= x.size()) fail("coordinate index exceeds state dimension");
      return x[n.index];
    case Op::Norm: return r;
    case Op::Add: return checked(eval_node(n.lhs, x, r) + eval_node(n.rhs, x, r));
    case Op::Sub: return checked(eval_node(n.lhs, x, r) - eval_node(n.rhs, x, r));
    case Op::Mul: return checked(eval_node(n.lhs, x, r) * eval_node(n.rhs, x, r));
    case Op::Div: {
      const double num = eval_node(n.lhs, x, r);
      const double den = eval_node(n.rhs, x, r);
      if (den == 0.0) fail("division by zero");
      return checked(num / den);
    }
    case Op::Neg: return -eval_node(n.lhs, x, r);
    case Op::Log: {
      const double a = eval_node(n.lhs, x, r);
      if (a < 0.0) fail("log of a negative number");
      if (a == 0.0) fail("log of zero");
      return std::log(a);
    }
    case Op::Exp: return checked(std::exp(eval_node(n.lhs, x, r)));
    case Op::Sqrt: {
      const double a = eval_node(n.lhs, x, r);
      if (a < 0.0) fail("sqrt of a negative number");
      return std::sqrt(a);
    }
    case Op::Pow: return checked(std::pow(eval_node(n.lhs, x, r), eval_node(n.rhs, x, r)));
    case Op::Min: return std::min(eval_node(n.lhs, x, r), eval_node(n.rhs, x, r));
    case Op::Max: return std::max(eval_node(n.lhs, x, r), eval_node(n.rhs, x, r));
  }
  return fail("corrupt expression node");
}

std::size_t RateExpr::max_variable() const {
  std::size_t m = 0;
  for (const auto& n : nodes_)
    if (n.op == Op::Var) m = std::max<std::size_t>(m, n.index + 1);
  return m;
}

std::string RateExpr::print() const {
  return root_ < 0 ? std::string() : print_subtree(root_);
}

std::string RateExpr::print_subtree(std::int32_t i) const {
  std::string out;
  print_node(i, out);
  return out;
}

void RateExpr::print_node(std::int32_t i, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  auto child = [&](std::int32_t c, bool paren) {
    if (paren) out += '(';
    print_node(c, out);
    if (paren) out += ')';
  };
  auto prec_of = [&](std::int32_t c) { return precedence(nodes_[static_cast<std::size_t>(c)].op); };
  switch (n.op) {
    case Op::Number: {
      std::array<char, 32> buf{};
      auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
      out.append(buf.data(), ptr);
      return;
    }
    case Op::Var: out += "x" + std::to_string(n.index + 1); return;
    case Op::Norm: out += "norm"; return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const int p = precedence(n.op);
      const char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*' : '/';
      child(n.lhs, prec_of(n.lhs) < p);
      out += ' ';
      out += sym;
      out += ' ';
      // Left-associative: an equal-precedence right operand needs parentheses.
      child(n.rhs, prec_of(n.rhs) <= p);
      return;
    }
    case Op::Neg:
      out += '-';
      child(n.lhs, prec_of(n.lhs) < 3);
      return;
    default: break;
  }
  for (const auto& f : kFunctions) {
    if (f.op != n.op) continue;
    out += f.name;
    out += '(';
    print_node(n.lhs, out);
    if (f.arity == 2) {
      out += ", ";
      print_node(n.rhs, out);
    }
    out += ')';
    return;
  }
}

namespace {

bool equal_nodes(const RateExpr::Node* an, std::int32_t a, const RateExpr::Node* bn, std::int32_t b);

}  // namespace

bool operator==(const RateExpr& a, const RateExpr& b) {
  if (a.root_ < 0 || b.root_ < 0) return a.root_ == b.root_;
  return equal_nodes(a.nodes_.data(), a.root_, b.nodes_.data(), b.root_);
}

namespace {

bool equal_nodes(const RateExpr::Node* an, std::int32_t a, const RateExpr::Node* bn, std::int32_t b) {
  if (a < 0 || b < 0) return a == b;
  const auto& x = an[a];
  const auto& y = bn[b];
  if (x.op != y.op || x.value != y.value || x.index != y.index) return false;
  return equal_nodes(an, x.lhs, bn, y.lhs) && equal_nodes(an, x.rhs, bn, y.rhs);
}

}  // namespace

}  // namespace bdstab
