#pragma once

// Shunting-yard evaluator used to cross-check the engine's recursive-descent
// parser. Same language: + - * / unary minus, parentheses, min/max, x/0 = 0.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwarfs::testing {

inline double oracle_eval(const std::string& text,
                          const std::function<double(const std::string&)>& var) {
  struct Tok {
    enum K { num, op, fn, lparen } k;
    double v = 0;
    char c = 0;
    std::string name;
    int argc = 0;
  };
  std::vector<double> vals;
  std::vector<Tok> ops;
  std::vector<int> argcs;

  auto prec = [](char c) { return c == '~' ? 3 : (c == '*' || c == '/') ? 2 : 1; };
  auto apply = [&](const Tok& t) {
    if (t.k == Tok::fn) {
      std::vector<double> a(vals.end() - t.argc, vals.end());
      vals.resize(vals.size() - t.argc);
      vals.push_back(t.name == "min" ? *std::min_element(a.begin(), a.end())
                                     : *std::max_element(a.begin(), a.end()));
      return;
    }
    if (t.c == '~') {
      vals.back() = -vals.back();
      return;
    }
    double b = vals.back();
    vals.pop_back();
    double a = vals.back();
    vals.pop_back();
    switch (t.c) {
      case '+': vals.push_back(a + b); break;
      case '-': vals.push_back(a - b); break;
      case '*': vals.push_back(a * b); break;
      default: vals.push_back(b == 0.0 ? 0.0 : a / b); break;
    }
  };

  bool expect_operand = true;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end;
      vals.push_back(std::strtod(text.c_str() + i, &end));
      i = end - text.c_str();
      expect_operand = false;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                                 text[j] == '_' || text[j] == '.'))
        ++j;
      std::string name = text.substr(i, j - i);
      std::size_t k = j;
      while (k < text.size() && text[k] == ' ') ++k;
      if ((name == "min" || name == "max") && k < text.size() && text[k] == '(') {
        ops.push_back({Tok::fn, 0, 0, name, 0});
        ops.push_back({Tok::lparen});
        argcs.push_back(1);
        i = k + 1;
        expect_operand = true;
      } else {
        vals.push_back(var(name));
        i = j;
        expect_operand = false;
      }
    } else if (c == '(') {
      ops.push_back({Tok::lparen});
      argcs.push_back(-1);
      ++i;
      expect_operand = true;
    } else if (c == ',' || c == ')') {
      while (ops.back().k != Tok::lparen) {
        apply(ops.back());
        ops.pop_back();
      }
      if (c == ',') {
        ++argcs.back();
        expect_operand = true;
      } else {
        ops.pop_back();
        int argc = argcs.back();
        argcs.pop_back();
        if (argc > 0) {
          Tok f = ops.back();
          ops.pop_back();
          f.argc = argc;
          apply(f);
        }
        expect_operand = false;
      }
      ++i;
    } else {
      char op = c;
      if (expect_operand) {
        if (c == '+') {
          ++i;
          continue;
        }
        op = '~';
      }
      // Unary minus is right-associative; binary operators are left-associative.
      while (!ops.empty() && ops.back().k == Tok::op &&
             (op == '~' ? prec(ops.back().c) > prec(op) : prec(ops.back().c) >= prec(op))) {
        apply(ops.back());
        ops.pop_back();
      }
      ops.push_back({Tok::op, 0, op});
      ++i;
      expect_operand = true;
    }
  }
  while (!ops.empty()) {
    apply(ops.back());
    ops.pop_back();
  }
  if (vals.size() != 1) throw std::runtime_error("oracle: malformed expression " + text);
  return vals.back();
}

}  // namespace dwarfs::testing
