#pragma once

#include <memory>
#include <string>

#include "orthocurv/jet.hpp"
#include "orthocurv/util.hpp"

namespace orthocurv::dsl {

// Grammar (implemented exactly as printed; '-' binds at atom level, so
// -x1^2 parses as (-x1)^2, and '^' is right-associative):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' factor)?
//   atom   := number | ident '(' expr ')' | var | '(' expr ')' | '-' atom
//   var    := 'x' digits            (1-based)
// Functions: sin cos tan exp log sqrt.

struct ParseError : ConfigError {
  ParseError(const std::string& msg, int offset);
  int offset;
};

struct EvalError : NumericError {
  EvalError(const std::string& msg, int offset);
  int offset;
};

enum class NodeKind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class FnKind { Sin, Cos, Tan, Exp, Log, Sqrt };

struct Node {
  NodeKind kind;
  double num = 0.0;       // Num
  int var = 0;            // Var, 1-based
  FnKind fn = FnKind::Sin;
  std::unique_ptr<Node> a, b;
  int offset = 0;         // byte offset in source, for error reporting
};

class Expression {
 public:
  Expression() = default;
  Expression(const Expression& o);
  Expression& operator=(const Expression& o);
  Expression(Expression&&) = default;
  Expression& operator=(Expression&&) = default;

  static Expression parse(const std::string& src);  // throws ParseError

  bool empty() const { return root_ == nullptr; }
  std::string print() const;  // minimal parentheses; parse(print(e)) == e
  int max_var() const;        // highest variable index used (0 if constant)

  // Evaluation over jets; x has dim entries, variables beyond dim are an
  // EvalError. Domain violations carry the offending node's source offset.
  Jet eval(const double* x, int dim, int order) const;
  double eval_value(const double* x, int dim) const;

  const std::string& source() const { return src_; }

 private:
  std::unique_ptr<Node> root_;
  std::string src_;
};

}  // namespace orthocurv::dsl
