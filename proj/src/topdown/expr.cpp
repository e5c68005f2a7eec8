#include "dwarfs/topdown/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <vector>

#include "dwarfs/common/error.hpp"

namespace dwarfs::topdown {

struct Expression::Node {
  enum class Op { constant, variable, neg, add, sub, mul, div, min, max } op;
  double value = 0.0;
  std::string name;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

class Parser {
 public:
  Parser(std::string_view text, std::set<std::string>& vars) : s_(text), vars_(vars) {}

  NodePtr parse() {
    auto n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw FormatError("expression '" + std::string(s_) + "': " + why + " at column " +
                      std::to_string(pos_ + 1));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr make(Node::Op op, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    return n;
  }

  NodePtr sum() {
    auto lhs = product();
    for (;;) {
      if (eat('+')) lhs = make(Node::Op::add, {lhs, product()});
      else if (eat('-')) lhs = make(Node::Op::sub, {lhs, product()});
      else return lhs;
    }
  }
  NodePtr product() {
    auto lhs = unary();
    for (;;) {
      if (eat('*')) lhs = make(Node::Op::mul, {lhs, unary()});
      else if (eat('/')) lhs = make(Node::Op::div, {lhs, unary()});
      else return lhs;
    }
  }
  NodePtr unary() {
    if (eat('-')) return make(Node::Op::neg, {unary()});
    if (eat('+')) return unary();
    return primary();
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (eat('(')) {
      auto n = sum();
      if (!eat(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::string tail(s_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(tail.c_str(), &end);
      if (end == tail.c_str()) fail("bad number");
      pos_ += static_cast<std::size_t>(end - tail.c_str());
      auto n = std::make_shared<Node>();
      n->op = Node::Op::constant;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const auto start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
              s_[pos_] == '.'))
        ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if ((name == "min" || name == "max") && eat('(')) {
        std::vector<NodePtr> args{sum()};
        while (eat(',')) args.push_back(sum());
        if (!eat(')')) fail("expected ')' after arguments");
        return make(name == "min" ? Node::Op::min : Node::Op::max, std::move(args));
      }
      vars_.insert(name);
      auto n = std::make_shared<Node>();
      n->op = Node::Op::variable;
      n->name = std::move(name);
      return n;
    }
    fail("unexpected character");
  }

  std::string_view s_;
  std::set<std::string>& vars_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, const Expression::Lookup& lookup) {
  switch (n.op) {
    case Node::Op::constant: return n.value;
    case Node::Op::variable: return lookup(n.name);
    case Node::Op::neg: return -eval(*n.args[0], lookup);
    case Node::Op::add: return eval(*n.args[0], lookup) + eval(*n.args[1], lookup);
    case Node::Op::sub: return eval(*n.args[0], lookup) - eval(*n.args[1], lookup);
    case Node::Op::mul: return eval(*n.args[0], lookup) * eval(*n.args[1], lookup);
    case Node::Op::div: {
      const double num = eval(*n.args[0], lookup);
      const double den = eval(*n.args[1], lookup);
      return den == 0.0 ? 0.0 : num / den;
    }
    case Node::Op::min:
    case Node::Op::max: {
      double acc = eval(*n.args[0], lookup);
      for (std::size_t i = 1; i < n.args.size(); ++i) {
        const double v = eval(*n.args[i], lookup);
        acc = n.op == Node::Op::min ? std::min(acc, v) : std::max(acc, v);
      }
      return acc;
    }
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.text_ = std::string(text);
  e.root_ = Parser(text, e.vars_).parse();
  return e;
}

double Expression::evaluate(const Lookup& lookup) const { return eval(*root_, lookup); }

}  // namespace dwarfs::topdown
