#include "philap/timeexpr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "philap/common.hpp"

namespace philap {

struct TimeExpr::Node {
  enum class Kind {
    constant,
    time,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    sin,
    cos,
    abs
  };
  Kind kind = Kind::constant;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;

  double eval(double t) const {
    switch (kind) {
      case Kind::constant: return value;
      case Kind::time: return t;
      case Kind::add: return a->eval(t) + b->eval(t);
      case Kind::sub: return a->eval(t) - b->eval(t);
      case Kind::mul: return a->eval(t) * b->eval(t);
      case Kind::div: return a->eval(t) / b->eval(t);
      case Kind::pow: return std::pow(a->eval(t), b->eval(t));
      case Kind::neg: return -a->eval(t);
      case Kind::sin: return std::sin(a->eval(t));
      case Kind::cos: return std::cos(a->eval(t));
      case Kind::abs: return std::abs(a->eval(t));
    }
    return 0.0;
  }

  bool uses_time() const {
    if (kind == Kind::time) return true;
    if (a && a->uses_time()) return true;
    return b && b->uses_time();
  }
};

namespace {

using Node = TimeExpr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Node::Kind kind, NodePtr a = nullptr, NodePtr b = nullptr,
                  double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->value = value;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    char msg[192];
    std::snprintf(msg, sizeof(msg),
                  "time expression '%s': %s at position %zu",
                  text_.c_str(), what.c_str(), pos_);
    throw std::invalid_argument(msg);
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (consume('+'))
        lhs = make_node(Node::Kind::add, lhs, term());
      else if (consume('-'))
        lhs = make_node(Node::Kind::sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (true) {
      if (consume('*'))
        lhs = make_node(Node::Kind::mul, lhs, factor());
      else if (consume('/'))
        lhs = make_node(Node::Kind::div, lhs, factor());
      else
        return lhs;
    }
  }

  NodePtr factor() {
    NodePtr base = unary();
    if (consume('^')) return make_node(Node::Kind::pow, base, factor());
    return base;
  }

  NodePtr unary() {
    if (consume('-')) return make_node(Node::Kind::neg, unary());
    return primary();
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    if (consume('(')) {
      NodePtr e = expr();
      if (!consume(')')) fail("missing ')'");
      return e;
    }
    fail("expected a number, name or '('");
  }

  NodePtr number() {
    const char* start = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) fail("bad number");
    pos_ += static_cast<std::size_t>(end - start);
    return make_node(Node::Kind::constant, nullptr, nullptr, v);
  }

  NodePtr word() {
    std::size_t len = 0;
    while (pos_ + len < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_ + len])))
      ++len;
    const std::string name = text_.substr(pos_, len);
    pos_ += len;
    if (name == "t") return make_node(Node::Kind::time);
    if (name == "pi")
      return make_node(Node::Kind::constant, nullptr, nullptr, kPi);
    Node::Kind kind;
    if (name == "sin")
      kind = Node::Kind::sin;
    else if (name == "cos")
      kind = Node::Kind::cos;
    else if (name == "abs")
      kind = Node::Kind::abs;
    else
      fail("unknown name '" + name + "'");
    if (!consume('(')) fail("expected '(' after '" + name + "'");
    NodePtr arg = expr();
    if (!consume(')')) fail("missing ')'");
    return make_node(kind, arg);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

TimeExpr TimeExpr::parse(const std::string& text) {
  Parser parser(text);
  return TimeExpr(text, parser.run());
}

double TimeExpr::operator()(double t) const { return root_->eval(t); }

std::function<double(double)> TimeExpr::fn() const {
  auto root = root_;
  return [root](double t) { return root->eval(t); };
}

bool TimeExpr::constant() const { return !root_->uses_time(); }

double parse_constant_expression(const std::string& text) {
  const TimeExpr e = TimeExpr::parse(text);
  if (!e.constant())
    throw std::invalid_argument("expression '" + text +
                                "' must not reference t here");
  return e(0.0);
}

}  // namespace philap
