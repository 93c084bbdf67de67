#include "epslab/exprparse.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace epslab::expr {

const char* var_name(Var v) {
  switch (v) {
    case Var::t: return "t";
    case Var::y: return "y";
    case Var::tau: return "tau";
    case Var::x: return "x";
  }
  return "?";
}

std::optional<Var> var_from_name(std::string_view name) {
  if (name == "t") return Var::t;
  if (name == "y") return Var::y;
  if (name == "tau") return Var::tau;
  if (name == "x") return Var::x;
  return std::nullopt;
}

Bindings::Bindings(std::initializer_list<std::pair<std::string_view, double>> values) {
  for (const auto& [name, value] : values) {
    auto v = var_from_name(name);
    if (!v) throw UnknownVariable(std::string(name), 0);
    set(*v, value);
  }
}

Bindings Bindings::from_map(const std::map<std::string, double>& values) {
  Bindings b;
  for (const auto& [name, value] : values) {
    auto v = var_from_name(name);
    if (!v) throw UnknownVariable(name, 0);
    b.set(*v, value);
  }
  return b;
}

namespace {

const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::sqrt: return "sqrt";
    case Func::abs: return "abs";
  }
  return "?";
}

std::optional<Func> func_from_name(std::string_view s) {
  if (s == "sin") return Func::sin;
  if (s == "cos") return Func::cos;
  if (s == "exp") return Func::exp;
  if (s == "sqrt") return Func::sqrt;
  if (s == "abs") return Func::abs;
  return std::nullopt;
}

NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Grammar (lowest to highest binding):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?        right-associative via unary -> power
//   primary := number | ident | ident '(' sum ')' | '(' sum ')'
class Parser {
 public:
  Parser(std::string_view src, const std::vector<Var>& allowed) : src_(src), allowed_(allowed) {}

  NodePtr run() {
    skip_ws();
    if (pos_ >= src_.size()) fail({"number", "identifier", "(", "-"});
    NodePtr n = sum();
    skip_ws();
    if (pos_ < src_.size()) fail({"+", "-", "*", "/", "^", "end of input"});
    return n;
  }

 private:
  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) throw ParseError(p.pos_, {}, "nesting deeper than " + std::to_string(kMaxDepth));
    }
    ~DepthGuard() { --p.depth_; }
  };

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string found = pos_ < src_.size() ? "'" + std::string(1, src_[pos_]) + "'" : "end of input";
    throw ParseError(pos_, std::move(expected), found);
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    DepthGuard g(*this);
    NodePtr n = product();
    for (;;) {
      if (accept('+')) n = make(Node::Kind::Add, n, product());
      else if (accept('-')) n = make(Node::Kind::Sub, n, product());
      else return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Node::Kind::Mul, n, unary());
      else if (accept('/')) n = make(Node::Kind::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    DepthGuard g(*this);
    if (accept('-')) return make(Node::Kind::Negate, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail({"number", "identifier", "(", "-"});
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = sum();
      if (!accept(')')) fail({")"});
      return n;
    }
    if (is_digit(c) || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    fail({"number", "identifier", "(", "-"});
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    if (pos_ - start == 1 && src_[start] == '.') {
      pos_ = start;
      fail({"digit"});
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && is_digit(src_[pos_])) {
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      } else {
        pos_ = save;  // "2e" is 2 followed by an identifier; let the caller reject it
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      fail({"finite number"});
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Number;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (auto f = func_from_name(name)) {
      if (!accept('(')) fail({"("});
      NodePtr arg = sum();
      if (!accept(')')) fail({")"});
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Call;
      n->func = *f;
      n->lhs = std::move(arg);
      return n;
    }
    if (name == "pi" || name == "e") {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Constant;
      n->name = std::string(name);
      n->value = name == "pi" ? std::numbers::pi : std::numbers::e;
      return n;
    }
    auto v = var_from_name(name);
    bool ok = false;
    if (v)
      for (Var a : allowed_) ok = ok || a == *v;
    if (!ok) throw UnknownVariable(std::string(name), start);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    n->var = *v;
    return n;
  }

  std::string_view src_;
  const std::vector<Var>& allowed_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string("non-finite result in ") + what);
  return v;
}

double eval_node(const Node& n, const Bindings& b) {
  switch (n.kind) {
    case Node::Kind::Number:
    case Node::Kind::Constant: return n.value;
    case Node::Kind::Variable:
      if (!b.has(n.var)) throw EvalError(std::string("variable '") + var_name(n.var) + "' is not bound");
      return b.get(n.var);
    case Node::Kind::Negate: return -eval_node(*n.lhs, b);
    case Node::Kind::Add: return checked(eval_node(*n.lhs, b) + eval_node(*n.rhs, b), "+");
    case Node::Kind::Sub: return checked(eval_node(*n.lhs, b) - eval_node(*n.rhs, b), "-");
    case Node::Kind::Mul: return checked(eval_node(*n.lhs, b) * eval_node(*n.rhs, b), "*");
    case Node::Kind::Div: {
      const double num = eval_node(*n.lhs, b);
      const double den = eval_node(*n.rhs, b);
      if (den == 0.0) throw EvalError("division by zero");
      return checked(num / den, "/");
    }
    case Node::Kind::Pow: {
      const double base = eval_node(*n.lhs, b);
      const double ex = eval_node(*n.rhs, b);
      if (base == 0.0 && ex < 0.0) throw EvalError("division by zero in power");
      return checked(std::pow(base, ex), "^");
    }
    case Node::Kind::Call: {
      const double a = eval_node(*n.lhs, b);
      switch (n.func) {
        case Func::sin: return std::sin(a);
        case Func::cos: return std::cos(a);
        case Func::exp: return checked(std::exp(a), "exp");
        case Func::sqrt:
          if (a < 0.0) throw EvalError("sqrt of a negative number");
          return std::sqrt(a);
        case Func::abs: return std::abs(a);
      }
    }
  }
  throw EvalError("malformed expression");
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Node::Kind::Constant: out += n.name; return;
    case Node::Kind::Variable: out += var_name(n.var); return;
    case Node::Kind::Negate:
      out += "(-";
      print_node(*n.lhs, out);
      out += ")";
      return;
    case Node::Kind::Call:
      out += func_name(n.func);
      out += "(";
      print_node(*n.lhs, out);
      out += ")";
      return;
    default: break;
  }
  const char* op = n.kind == Node::Kind::Add ? " + "
                   : n.kind == Node::Kind::Sub ? " - "
                   : n.kind == Node::Kind::Mul ? " * "
                   : n.kind == Node::Kind::Div ? " / "
                                               : " ^ ";
  out += "(";
  print_node(*n.lhs, out);
  out += op;
  print_node(*n.rhs, out);
  out += ")";
}

bool node_uses(const Node* n, Var v) {
  if (!n) return false;
  if (n->kind == Node::Kind::Variable) return n->var == v;
  return node_uses(n->lhs.get(), v) || node_uses(n->rhs.get(), v);
}

}  // namespace

double Expr::eval(const Bindings& b) const {
  if (!root_) throw EvalError("empty expression");
  return eval_node(*root_, b);
}

std::string Expr::to_string() const {
  std::string out;
  if (root_) print_node(*root_, out);
  return out;
}

bool Expr::uses(Var v) const { return node_uses(root_.get(), v); }

Expr parse(std::string_view src, const std::vector<Var>& allowed) {
  Parser p(src, allowed);
  return Expr(p.run(), std::string(src));
}

Expr parse(std::string_view src, std::initializer_list<Var> allowed) {
  return parse(src, std::vector<Var>(allowed));
}

double eval(const Expr& e, const Bindings& b) { return e.eval(b); }

}  // namespace epslab::expr
