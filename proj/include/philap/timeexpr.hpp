#pragma once

#include <functional>
#include <memory>
#include <string>

namespace philap {

// Small closed expression grammar for time coefficients:
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := unary ('^' factor)?
//   unary  := '-' unary | primary
//   primary:= number | 't' | 'pi' | sin(expr) | cos(expr) | abs(expr) | (expr)
// The original text is kept verbatim so configs round-trip losslessly.
class TimeExpr {
 public:
  // Throws std::invalid_argument with the offending position on bad input.
  static TimeExpr parse(const std::string& text);

  double operator()(double t) const;
  const std::string& text() const { return text_; }
  // Copyable evaluation handle.
  std::function<double(double)> fn() const;
  // True when the expression never references t.
  bool constant() const;

  struct Node;

 private:
  TimeExpr(std::string text, std::shared_ptr<const Node> root)
      : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  std::shared_ptr<const Node> root_;
};

// Parses an expression and requires it to be constant (no t); returns its
// value.  Used for numeric config fields so "13/6" or "2*pi" stay exact in
// the config text.
double parse_constant_expression(const std::string& text);

}  // namespace philap
