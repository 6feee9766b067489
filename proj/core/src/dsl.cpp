#include "orthocurv/dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace orthocurv::dsl {

ParseError::ParseError(const std::string& msg, int off)
    : ConfigError("parse error at offset " + std::to_string(off) + ": " + msg), offset(off) {}

EvalError::EvalError(const std::string& msg, int off)
    : NumericError("evaluation error at offset " + std::to_string(off) + ": " + msg), offset(off) {}

namespace {

std::unique_ptr<Node> clone(const Node* n) {
  if (!n) return nullptr;
  auto r = std::make_unique<Node>();
  r->kind = n->kind;
  r->num = n->num;
  r->var = n->var;
  r->fn = n->fn;
  r->offset = n->offset;
  r->a = clone(n->a.get());
  r->b = clone(n->b.get());
  return r;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  std::unique_ptr<Node> run() {
    auto e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("unexpected trailing input", static_cast<int>(pos_));
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool eat(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::unique_ptr<Node> make(NodeKind k, int off) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->offset = off;
    return n;
  }

  std::unique_ptr<Node> expr() {
    auto lhs = term();
    for (;;) {
      const int off = static_cast<int>(pos_);
      if (eat('+')) {
        auto n = make(NodeKind::Add, off);
        n->a = std::move(lhs);
        n->b = term();
        lhs = std::move(n);
      } else if (eat('-')) {
        auto n = make(NodeKind::Sub, off);
        n->a = std::move(lhs);
        n->b = term();
        lhs = std::move(n);
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Node> term() {
    auto lhs = factor();
    for (;;) {
      const int off = static_cast<int>(pos_);
      if (eat('*')) {
        auto n = make(NodeKind::Mul, off);
        n->a = std::move(lhs);
        n->b = factor();
        lhs = std::move(n);
      } else if (eat('/')) {
        auto n = make(NodeKind::Div, off);
        n->a = std::move(lhs);
        n->b = factor();
        lhs = std::move(n);
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Node> factor() {
    auto base = atom();
    const int off = static_cast<int>(pos_);
    if (eat('^')) {
      auto n = make(NodeKind::Pow, off);
      n->a = std::move(base);
      n->b = factor();  // right-associative
      return n;
    }
    return base;
  }

  std::unique_ptr<Node> atom() {
    const char c = peek();
    const int off = static_cast<int>(pos_);
    if (c == '\0') throw ParseError("unexpected end of input", off);
    if (c == '-') {
      ++pos_;
      auto n = make(NodeKind::Neg, off);
      n->a = atom();
      return n;
    }
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!eat(')')) throw ParseError("expected ')'", static_cast<int>(pos_));
      return e;  // no paren nodes: print() re-inserts only necessary parens
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(off);
    if (std::isalpha(static_cast<unsigned char>(c))) return ident(off);
    throw ParseError(std::string("unexpected character '") + c + "'", off);
  }

  std::unique_ptr<Node> number(int off) {
    std::size_t p = pos_;
    while (p < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[p])) || s_[p] == '.')) ++p;
    if (p < s_.size() && (s_[p] == 'e' || s_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        ++q;
        while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) ++q;
        p = q;
      }
    }
    const std::string tok = s_.substr(pos_, p - pos_);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      throw ParseError("malformed number '" + tok + "'", off);
    pos_ = p;
    auto n = make(NodeKind::Num, off);
    n->num = v;
    return n;
  }

  std::unique_ptr<Node> ident(int off) {
    std::size_t p = pos_;
    while (p < s_.size() && std::isalpha(static_cast<unsigned char>(s_[p]))) ++p;
    const std::string name = s_.substr(pos_, p - pos_);
    if (name == "x") {
      std::size_t q = p;
      while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) ++q;
      if (q == p) throw ParseError("'x' must be followed by a variable index", off);
      const long idx = std::strtol(s_.substr(p, q - p).c_str(), nullptr, 10);
      if (idx < 1) throw ParseError("variable indices start at x1", off);
      pos_ = q;
      auto n = make(NodeKind::Var, off);
      n->var = static_cast<int>(idx);
      return n;
    }
    FnKind fn;
    if (name == "sin") fn = FnKind::Sin;
    else if (name == "cos") fn = FnKind::Cos;
    else if (name == "tan") fn = FnKind::Tan;
    else if (name == "exp") fn = FnKind::Exp;
    else if (name == "log") fn = FnKind::Log;
    else if (name == "sqrt") fn = FnKind::Sqrt;
    else throw ParseError("unknown function '" + name + "'", off);
    pos_ = p;
    if (!eat('(')) throw ParseError("expected '(' after function name", static_cast<int>(pos_));
    auto n = make(NodeKind::Call, off);
    n->fn = fn;
    n->a = expr();
    if (!eat(')')) throw ParseError("expected ')'", static_cast<int>(pos_));
    return n;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

// Precedence for printing: Add/Sub = 1, Mul/Div = 2, Pow = 3, Neg/atoms = 4.
// Neg prints at atom tightness because the grammar's '-' lives at atom level.
int prec(const Node* n) {
  switch (n->kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Pow: return 3;
    default: return 4;
  }
}

void print_node(const Node* n, std::string& out);

void print_wrapped(const Node* n, int min_prec, std::string& out) {
  if (prec(n) < min_prec) {
    out += '(';
    print_node(n, out);
    out += ')';
  } else {
    print_node(n, out);
  }
}

std::string fn_name(FnKind f) {
  switch (f) {
    case FnKind::Sin: return "sin";
    case FnKind::Cos: return "cos";
    case FnKind::Tan: return "tan";
    case FnKind::Exp: return "exp";
    case FnKind::Log: return "log";
    case FnKind::Sqrt: return "sqrt";
  }
  return "?";
}

void print_node(const Node* n, std::string& out) {
  switch (n->kind) {
    case NodeKind::Num: {
      std::string s = float17(n->num);
      out += s;
      break;
    }
    case NodeKind::Var:
      out += "x" + std::to_string(n->var);
      break;
    case NodeKind::Neg:
      out += '-';
      print_wrapped(n->a.get(), 4, out);
      break;
    case NodeKind::Add:
      print_wrapped(n->a.get(), 1, out);
      out += " + ";
      print_wrapped(n->b.get(), 2, out);
      break;
    case NodeKind::Sub:
      print_wrapped(n->a.get(), 1, out);
      out += " - ";
      print_wrapped(n->b.get(), 2, out);
      break;
    case NodeKind::Mul:
      print_wrapped(n->a.get(), 2, out);
      out += "*";
      print_wrapped(n->b.get(), 3, out);
      break;
    case NodeKind::Div:
      print_wrapped(n->a.get(), 2, out);
      out += "/";
      print_wrapped(n->b.get(), 3, out);
      break;
    case NodeKind::Pow:
      // Base must re-parse as an atom followed by '^': Neg bases are fine
      // unwrapped (-x1^2 round-trips to Pow(Neg x1, 2)), but a Neg base whose
      // child is itself a Pow needs parens, handled by the child's own print.
      if (prec(n->a.get()) < 4 || n->a->kind == NodeKind::Pow) {
        out += '(';
        print_node(n->a.get(), out);
        out += ')';
      } else {
        print_node(n->a.get(), out);
      }
      out += '^';
      print_wrapped(n->b.get(), 3, out);
      break;
    case NodeKind::Call:
      out += fn_name(n->fn);
      out += '(';
      print_node(n->a.get(), out);
      out += ')';
      break;
  }
}

int max_var_node(const Node* n) {
  if (!n) return 0;
  int m = n->kind == NodeKind::Var ? n->var : 0;
  m = std::max(m, max_var_node(n->a.get()));
  m = std::max(m, max_var_node(n->b.get()));
  return m;
}

// Constant-integer detection for '^': an exponent subtree made of a numeric
// literal (optionally negated) with integral value takes the repeated-
// multiplication route, which is defined for negative bases.
bool const_int(const Node* n, long long& out) {
  if (n->kind == NodeKind::Neg) {
    long long v;
    if (const_int(n->a.get(), v)) {
      out = -v;
      return true;
    }
    return false;
  }
  if (n->kind != NodeKind::Num) return false;
  const double v = n->num;
  if (std::fabs(v) > 1e15 || v != std::floor(v)) return false;
  out = static_cast<long long>(v);
  return true;
}

Jet eval_node(const Node* n, const double* x, int dim, int order) {
  switch (n->kind) {
    case NodeKind::Num:
      return Jet::constant(n->num, dim, order);
    case NodeKind::Var:
      if (n->var > dim)
        throw EvalError("variable x" + std::to_string(n->var) + " exceeds chart dimension " +
                            std::to_string(dim),
                        n->offset);
      return Jet::variable(x[n->var - 1], n->var - 1, dim, order);
    case NodeKind::Neg:
      return -eval_node(n->a.get(), x, dim, order);
    case NodeKind::Add:
      return eval_node(n->a.get(), x, dim, order) + eval_node(n->b.get(), x, dim, order);
    case NodeKind::Sub:
      return eval_node(n->a.get(), x, dim, order) - eval_node(n->b.get(), x, dim, order);
    case NodeKind::Mul:
      return eval_node(n->a.get(), x, dim, order) * eval_node(n->b.get(), x, dim, order);
    case NodeKind::Div:
      try {
        return eval_node(n->a.get(), x, dim, order) / eval_node(n->b.get(), x, dim, order);
      } catch (const EvalError&) {
        throw;
      } catch (const NumericError& e) {
        throw EvalError(e.what(), n->offset);
      }
    case NodeKind::Pow: {
      const Jet base = eval_node(n->a.get(), x, dim, order);
      long long k;
      try {
        if (const_int(n->b.get(), k)) return powi(base, k);
        const Jet w = eval_node(n->b.get(), x, dim, order);
        return pow(base, w);
      } catch (const EvalError&) {
        throw;
      } catch (const NumericError& e) {
        throw EvalError(e.what(), n->offset);
      }
    }
    case NodeKind::Call: {
      const Jet u = eval_node(n->a.get(), x, dim, order);
      try {
        switch (n->fn) {
          case FnKind::Sin: return sin(u);
          case FnKind::Cos: return cos(u);
          case FnKind::Tan: return tan(u);
          case FnKind::Exp: return exp(u);
          case FnKind::Log: return log(u);
          case FnKind::Sqrt: return sqrt(u);
        }
      } catch (const EvalError&) {
        throw;
      } catch (const NumericError& e) {
        throw EvalError(e.what(), n->offset);
      }
      throw EvalError("unreachable function kind", n->offset);
    }
  }
  throw EvalError("unreachable node kind", n->offset);
}

}  // namespace

Expression::Expression(const Expression& o) : root_(clone(o.root_.get())), src_(o.src_) {}

Expression& Expression::operator=(const Expression& o) {
  root_ = clone(o.root_.get());
  src_ = o.src_;
  return *this;
}

Expression Expression::parse(const std::string& src) {
  Parser p(src);
  Expression e;
  e.root_ = p.run();
  e.src_ = src;
  return e;
}

std::string Expression::print() const {
  if (!root_) return "0";
  std::string out;
  print_node(root_.get(), out);
  return out;
}

int Expression::max_var() const { return max_var_node(root_.get()); }

Jet Expression::eval(const double* x, int dim, int order) const {
  if (!root_) return Jet::constant(0.0, dim, order);
  return eval_node(root_.get(), x, dim, order);
}

double Expression::eval_value(const double* x, int dim) const {
  return eval(x, dim, 0).value();
}

}  // namespace orthocurv::dsl
