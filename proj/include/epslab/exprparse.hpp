#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epslab/errors.hpp"

namespace epslab::expr {

/// The four variables an expression may use.
enum class Var : std::uint8_t { t = 0, y = 1, tau = 2, x = 3 };
inline constexpr std::size_t kVarCount = 4;

const char* var_name(Var v);
std::optional<Var> var_from_name(std::string_view name);

enum class Func : std::uint8_t { sin, cos, exp, sqrt, abs };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind : std::uint8_t { Number, Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Number;
  double value = 0.0;      // Number / Constant
  std::string name;        // Constant ("pi", "e")
  Var var = Var::t;        // Variable
  Func func = Func::sin;   // Call
  NodePtr lhs;             // unary operand / left operand / call argument
  NodePtr rhs;
};

/// Values for the variables an expression is evaluated at. Unset slots make
/// evaluation of expressions that use them fail with EvalError.
class Bindings {
 public:
  Bindings() = default;
  Bindings(std::initializer_list<std::pair<std::string_view, double>> values);
  static Bindings from_map(const std::map<std::string, double>& values);

  Bindings& set(Var v, double value) {
    slots_[static_cast<std::size_t>(v)] = value;
    set_[static_cast<std::size_t>(v)] = true;
    return *this;
  }
  bool has(Var v) const { return set_[static_cast<std::size_t>(v)]; }
  double get(Var v) const { return slots_[static_cast<std::size_t>(v)]; }

 private:
  std::array<double, kVarCount> slots_{};
  std::array<bool, kVarCount> set_{};
};

/// A parsed real-valued expression.
class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr root, std::string source = {}) : root_(std::move(root)), source_(std::move(source)) {}

  double eval(const Bindings& b) const;
  double operator()(const Bindings& b) const { return eval(b); }

  /// Canonical text form; parsing it back gives an expression that
  /// evaluates identically.
  std::string to_string() const;
  const std::string& source() const noexcept { return source_; }
  const NodePtr& root() const noexcept { return root_; }
  bool valid() const noexcept { return root_ != nullptr; }
  bool uses(Var v) const;

 private:
  NodePtr root_;
  std::string source_;
};

/// Maximum parenthesis / operator nesting accepted by the parser.
inline constexpr int kMaxDepth = 200;

/// Parse `src`. Only variables listed in `allowed` may appear.
Expr parse(std::string_view src, std::initializer_list<Var> allowed = {Var::t, Var::y, Var::tau, Var::x});
Expr parse(std::string_view src, const std::vector<Var>& allowed);

/// Shorthand: parse then evaluate.
double eval(const Expr& e, const Bindings& b);

}  // namespace epslab::expr
