#pragma once

// Scalar conformal exponents written in a tiny grammar:
//
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := number | 'x' digit+ | 'sin' '(' expr ')' | '(' expr ')' | '-' factor
//
// Coordinates are x0 (time), x1, ..., x{m-1}. Subtraction and unary minus are
// sugar for multiplication by -1, so the node set stays {const, +, *, sin, coord}.

#include <Eigen/Dense>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lightrays/errors.hpp"

namespace lightrays {

class Expression {
 public:
  enum class Op { Const, Coord, Add, Mul, Sin };

  static Expression constant(double c) { return Expression(make(Op::Const, c, 0, {})); }
  static Expression coordinate(int i) { return Expression(make(Op::Coord, 0.0, i, {})); }

  static Expression parse(std::string_view text) {
    Parser p{text, 0};
    auto node = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return Expression(std::move(node));
  }

  double operator()(const Eigen::VectorXd& x) const { return eval(*root_, x); }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    accumulate_gradient(*root_, x, 1.0, g);
    return g;
  }

  // Largest coordinate index referenced, or -1 for a constant expression.
  int max_coordinate() const { return max_coord(*root_); }

  bool is_constant() const { return max_coordinate() < 0; }

  std::string to_string() const { return print(*root_); }

  friend Expression operator+(const Expression& a, const Expression& b) {
    return Expression(make(Op::Add, 0.0, 0, {a.root_, b.root_}));
  }
  friend Expression operator*(const Expression& a, const Expression& b) {
    return Expression(make(Op::Mul, 0.0, 0, {a.root_, b.root_}));
  }

 private:
  struct Node {
    Op op;
    double value;
    int index;
    std::vector<std::shared_ptr<const Node>> args;
  };
  using NodePtr = std::shared_ptr<const Node>;

  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  static NodePtr make(Op op, double value, int index, std::vector<NodePtr> args) {
    return std::make_shared<const Node>(Node{op, value, index, std::move(args)});
  }

  static double eval(const Node& n, const Eigen::VectorXd& x) {
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::Coord:
        if (n.index >= x.size())
          throw ModelError("expression references x" + std::to_string(n.index) +
                           " in dimension " + std::to_string(x.size()));
        return x[n.index];
      case Op::Add: return eval(*n.args[0], x) + eval(*n.args[1], x);
      case Op::Mul: return eval(*n.args[0], x) * eval(*n.args[1], x);
      case Op::Sin: return std::sin(eval(*n.args[0], x));
    }
    return 0.0;
  }

  static void accumulate_gradient(const Node& n, const Eigen::VectorXd& x, double w,
                                  Eigen::VectorXd& g) {
    switch (n.op) {
      case Op::Const: return;
      case Op::Coord:
        if (n.index >= x.size())
          throw ModelError("expression references x" + std::to_string(n.index));
        g[n.index] += w;
        return;
      case Op::Add:
        accumulate_gradient(*n.args[0], x, w, g);
        accumulate_gradient(*n.args[1], x, w, g);
        return;
      case Op::Mul:
        accumulate_gradient(*n.args[0], x, w * eval(*n.args[1], x), g);
        accumulate_gradient(*n.args[1], x, w * eval(*n.args[0], x), g);
        return;
      case Op::Sin:
        accumulate_gradient(*n.args[0], x, w * std::cos(eval(*n.args[0], x)), g);
        return;
    }
  }

  static int max_coord(const Node& n) {
    int m = n.op == Op::Coord ? n.index : -1;
    for (const auto& a : n.args) m = std::max(m, max_coord(*a));
    return m;
  }

  static std::string print(const Node& n) {
    switch (n.op) {
      case Op::Const: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.15g", n.value);
        std::string s = buf;
        return n.value < 0 ? "(" + s + ")" : s;
      }
      case Op::Coord: return "x" + std::to_string(n.index);
      case Op::Add: return "(" + print(*n.args[0]) + "+" + print(*n.args[1]) + ")";
      case Op::Mul: return print(*n.args[0]) + "*" + print(*n.args[1]);
      case Op::Sin: return "sin(" + print(*n.args[0]) + ")";
    }
    return {};
  }

  struct Parser {
    std::string_view s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& msg) const {
      throw ParseError("expression '" + std::string(s) + "' at column " +
                       std::to_string(pos + 1) + ": " + msg);
    }
    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    NodePtr expr() {
      NodePtr lhs = term();
      for (;;) {
        if (accept('+')) {
          lhs = make(Op::Add, 0.0, 0, {lhs, term()});
        } else if (accept('-')) {
          auto neg = make(Op::Mul, 0.0, 0, {make(Op::Const, -1.0, 0, {}), term()});
          lhs = make(Op::Add, 0.0, 0, {lhs, neg});
        } else {
          return lhs;
        }
      }
    }
    NodePtr term() {
      NodePtr lhs = factor();
      while (accept('*')) lhs = make(Op::Mul, 0.0, 0, {lhs, factor()});
      return lhs;
    }
    NodePtr factor() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of input");
      if (accept('-')) return make(Op::Mul, 0.0, 0, {make(Op::Const, -1.0, 0, {}), factor()});
      if (accept('(')) {
        auto e = expr();
        if (!accept(')')) fail("expected ')'");
        return e;
      }
      if (s.substr(pos, 3) == "sin") {
        pos += 3;
        if (!accept('(')) fail("expected '(' after sin");
        auto e = expr();
        if (!accept(')')) fail("expected ')'");
        return make(Op::Sin, 0.0, 0, {e});
      }
      if (s[pos] == 'x') {
        ++pos;
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos) fail("expected coordinate index after 'x'");
        return make(Op::Coord, 0.0, std::stoi(std::string(s.substr(start, pos - start))), {});
      }
      if (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.') {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(std::string(s.substr(pos)), &used);
        } catch (const std::exception&) {
          fail("malformed number");
        }
        pos += used;
        return make(Op::Const, v, 0, {});
      }
      fail(std::string("unexpected character '") + s[pos] + "'");
    }
  };

  NodePtr root_;
};

}  // namespace lightrays
