#pragma once

// Arithmetic expression language for user-defined rate functions.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := number | ident | func '(' args ')' | '(' expr ')' | '-' factor
//
// Identifiers are x1..xd (state coordinates) and `norm` (Euclidean |x|).
// Functions: log, exp, sqrt (unary); pow, min, max (binary).

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bdstab {

class RateExpr {
 public:
  enum class Op : std::uint8_t { Number, Var, Norm, Add, Sub, Mul, Div, Neg, Log, Exp, Sqrt, Pow, Min, Max };

  struct Node {
    Op op;
    double value = 0.0;        // Number
    std::uint32_t index = 0;   // Var, 0-based coordinate
    std::int32_t lhs = -1;     // first operand
    std::int32_t rhs = -1;     // second operand
  };

  RateExpr() = default;

  /// Evaluates at `x`. Throws EvalError on domain violations instead of
  /// propagating NaN or infinities.
  double evaluate(std::span<const double> x) const;

  /// Highest referenced coordinate, 1-based; 0 when no xi appears.
  std::size_t max_variable() const;

  /// Canonical text with minimal parentheses; parses back to an equal tree.
  std::string print() const;

  bool empty() const { return nodes_.empty(); }

  friend bool operator==(const RateExpr& a, const RateExpr& b);

 private:
  friend class Parser;

  double eval_node(std::int32_t i, std::span<const double> x, double r) const;
  void print_node(std::int32_t i, std::string& out) const;
  std::string print_subtree(std::int32_t i) const;

  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

/// Parses `text` into an expression tree. Throws ParseError carrying the
/// 1-based line and column of the first problem.
RateExpr parse(std::string_view text);

inline double evaluate(const RateExpr& expr, std::span<const double> x) { return expr.evaluate(x); }

inline std::string print(const RateExpr& expr) { return expr.print(); }

}  // namespace bdstab
