#pragma once

#include <set>
#include <string>
#include <vector>

#include "podsim/petri/value.hpp"

namespace podsim::petri {

/// Small expression tree used for guards and output-arc inscriptions.
/// Arithmetic promotes int to real when operands are mixed; logic operators
/// work on int 0/1; comparison yields int 0/1.
class Expr {
 public:
  enum class Op {
    Lit,
    Var,
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
  };

  static Expr lit(Value v);
  static Expr lit(std::int64_t v) { return lit(Value{v}); }
  static Expr lit(double v) { return lit(Value{v}); }
  static Expr lit(const char* v) { return lit(Value{std::string(v)}); }
  static Expr var(std::string name);

  static Expr add(Expr a, Expr b) { return binary(Op::Add, std::move(a), std::move(b)); }
  static Expr sub(Expr a, Expr b) { return binary(Op::Sub, std::move(a), std::move(b)); }
  static Expr mul(Expr a, Expr b) { return binary(Op::Mul, std::move(a), std::move(b)); }
  static Expr div(Expr a, Expr b) { return binary(Op::Div, std::move(a), std::move(b)); }
  static Expr eq(Expr a, Expr b) { return binary(Op::Eq, std::move(a), std::move(b)); }
  static Expr ne(Expr a, Expr b) { return binary(Op::Ne, std::move(a), std::move(b)); }
  static Expr lt(Expr a, Expr b) { return binary(Op::Lt, std::move(a), std::move(b)); }
  static Expr le(Expr a, Expr b) { return binary(Op::Le, std::move(a), std::move(b)); }
  static Expr gt(Expr a, Expr b) { return binary(Op::Gt, std::move(a), std::move(b)); }
  static Expr ge(Expr a, Expr b) { return binary(Op::Ge, std::move(a), std::move(b)); }
  static Expr logical_and(Expr a, Expr b) { return binary(Op::And, std::move(a), std::move(b)); }
  static Expr logical_or(Expr a, Expr b) { return binary(Op::Or, std::move(a), std::move(b)); }
  static Expr logical_not(Expr a);

  Op op() const { return op_; }

  /// Evaluates under a binding; throws EvalError on type mismatch or
  /// reference to an unbound variable.
  Value eval(const Binding& binding) const;

  /// Evaluates as a guard: result must be an int, nonzero means true.
  bool eval_bool(const Binding& binding) const;

  /// Collects every variable name referenced anywhere in the tree.
  void collect_vars(std::set<std::string>& out) const;

 private:
  Expr() = default;
  static Expr binary(Op op, Expr a, Expr b);

  Op op_ = Op::Lit;
  Value literal_{};
  std::string name_;
  std::vector<Expr> args_;
};

}  // namespace podsim::petri
