#pragma once

// Right-hand-side expression language.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] primary)*     exponent must be constant
//   primary := number | name | name '(' expr ')' | '(' expr ')'
//
// Functions: exp log sqrt sin cos tanh abs. All binary operators are left
// associative. Identifiers are resolved against a declared name list at parse
// time and evaluated by slot index.

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sntk/jet.hpp"

namespace sntk {

class Expr {
 public:
  enum class Kind { number, identifier, negate, add, sub, mul, div, pow, call };
  enum class Function { exp, log, sqrt, sin, cos, tanh, abs };

  struct Node {
    Kind kind{};
    double number = 0.0;
    std::size_t slot = 0;
    std::string name;  // identifier or function name
    Function function{};
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  /// Throws ParseError (with position) or UndeclaredIdentifierError.
  static Expr parse(std::string_view text, std::vector<std::string> declared);

  const Node& root() const noexcept { return *root_; }
  const std::vector<std::string>& declared() const noexcept { return *declared_; }

  /// Slot values follow the order of declared().
  double evaluate(std::span<const double> slots) const;
  Jet2 evaluate(std::span<const Jet2> slots) const;

  double evaluate(const std::map<std::string, double>& bindings) const;
  /// eval_jet: every declared name must be bound, all jets of one order.
  Jet2 evaluate(const std::map<std::string, Jet2>& bindings) const;

  /// Fully parenthesised form; reparses to an equal tree.
  std::string to_string() const;

  /// Structural equality (names, numbers, shapes).
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  Expr(std::shared_ptr<const Node> root, std::shared_ptr<const std::vector<std::string>> declared)
      : root_(std::move(root)), declared_(std::move(declared)) {}

  std::shared_ptr<const Node> root_;
  std::shared_ptr<const std::vector<std::string>> declared_;
};

}  // namespace sntk
