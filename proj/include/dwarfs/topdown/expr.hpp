#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace dwarfs::topdown {

/// Arithmetic over named variables: + - * /, unary minus, parentheses,
/// numeric literals, min(...) and max(...) with one or more arguments.
/// Division by zero yields 0 so that idle counters produce empty shares.
class Expression {
 public:
  using Lookup = std::function<double(const std::string&)>;

  /// Throws FormatError with the offending column on malformed input.
  static Expression parse(std::string_view text);

  double evaluate(const Lookup& lookup) const;
  const std::set<std::string>& variables() const { return vars_; }
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::set<std::string> vars_;
  std::string text_;
};

}  // namespace dwarfs::topdown
