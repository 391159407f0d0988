#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace schurlab {

// Small arithmetic expression language used for user-supplied symbols.
//
//   expr    := compare
//   compare := sum [('<' | '<=' | '>' | '>=' | '==' | '!=') sum]
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := atom ['^' unary]                      (right associative)
//   atom    := number | name | name '(' expr {',' expr} ')' | '(' expr ')'
//
// Names resolve to variables (supplied by the caller) or to the constants
// `pi` and `e`. Functions: sin cos tan asin acos atan sinh cosh tanh exp log
// sqrt abs sgn (one argument) and atan2 pow min max (two arguments).
// Comparisons evaluate to 1 or 0.
class Expression {
 public:
  struct Node;

  /// Parses `source`; `variables[i]` names the i-th input slot.
  static Expression parse(std::string_view source, const std::vector<std::string>& variables);

  double evaluate(std::span<const double> inputs) const;

  /// Symbolic partial derivative with respect to input slot `index`.
  /// Piecewise-constant pieces (comparisons, sgn) differentiate to zero and
  /// abs/min/max use their one-sided branch.
  Expression derivative(std::size_t index) const;

  /// Fully parenthesized form using the variable names given to parse().
  std::string to_string() const;
  std::size_t arity() const noexcept { return names_->size(); }

 private:
  using Names = std::shared_ptr<const std::vector<std::string>>;

  Expression(std::shared_ptr<const Node> root, Names names)
      : root_(std::move(root)), names_(std::move(names)) {}

  std::shared_ptr<const Node> root_;
  Names names_;
};

/// Input names "x1".."xm", "y1".."yn" used by symbol expressions.
std::vector<std::string> product_chart_variables(int m_dim, int n_dim);

}  // namespace schurlab
